#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ldb/combinatorics.hpp"
#include "ldb/constructions.hpp"
#include "ldb/dataset.hpp"
#include "ldb/norms.hpp"
#include "ldb/query.hpp"

namespace ldb {

// A dataset quantized at unit 1/u' and stored as the colex rank of its
// multiset of grid cells.
struct CoverCode {
  OpKind op = OpKind::Index;
  std::uint64_t n = 0;
  std::uint64_t d = 1;  // predicate dimensions
  std::uint64_t denominator = 1;
  BigInt index = 0;
  std::uint64_t bit_length = 0;
};

// Cell id of a quantized record: mixed radix over (u'+1), first coordinate
// most significant.
std::uint64_t record_cell(std::span<const double> record, std::uint64_t denominator);

CoverCode cover_encode(const Dataset& data, double eps, OpKind op);
// Records come back in ascending cell order (sorted for 1-d data).
Dataset cover_decode(const CoverCode& code);

// Bits needed for any index of a cover with these parameters.
std::uint64_t cover_bit_length(OpKind op, std::uint64_t n, std::uint64_t d,
                               std::uint64_t denominator);

// Index cover under a query measure: each value moves down to the left
// quantile of its equal-mass cell, so mu([decoded, original]) <= eps / n.
CoverCode cover_encode_mu(const Dataset& data, double eps, const Cdf& cdf);
Dataset cover_decode_mu(const CoverCode& code, const Cdf& cdf);

// Binary file layout, all multi-byte header fields little-endian:
//   "LDBC" | version 0x01 | op u8 | n u64 | d u16 | u' u64 | payload length u32
//   | index, big-endian, zero-padded to ceil(bit_length / 8) bytes.
std::vector<std::uint8_t> serialize(const CoverCode& code);
CoverCode deserialize(const std::vector<std::uint8_t>& bytes);
void write_code(const CoverCode& code, const std::filesystem::path& path);
CoverCode read_code(const std::filesystem::path& path);

// sigma-bit encoder keeping the top bits of the cover index, and the decoder
// that zero-fills the dropped bits.
Encoder truncated_cover_encoder(OpKind op, double eps, unsigned sigma);
DatasetDecoder truncated_cover_decoder(OpKind op, std::uint64_t n, std::uint64_t d, double eps,
                                       unsigned sigma);

}  // namespace ldb
