#include "ldb/rng.hpp"

#include <cmath>
#include <numbers>

#include "ldb/error.hpp"

namespace ldb {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EntryOutOfRange: return "EntryOutOfRange";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotOneDimensional: return "NotOneDimensional";
    case ErrorKind::NotSorted: return "NotSorted";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::RejectionStarvation: return "RejectionStarvation";
    case ErrorKind::InvalidRequest: return "InvalidRequest";
    case ErrorKind::InvalidArgs: return "InvalidArgs";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::FamilyTooLarge: return "FamilyTooLarge";
    case ErrorKind::CdfNotMonotone: return "CdfNotMonotone";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::InvalidRank: return "InvalidRank";
    case ErrorKind::NoCollision: return "NoCollision";
    case ErrorKind::DivergenceDetected: return "DivergenceDetected";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) noexcept {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t Rng::below(std::uint64_t bound) noexcept {
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = -bound % bound;
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x >= limit) return x % bound;
  }
}

double Rng::normal() noexcept {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace ldb
