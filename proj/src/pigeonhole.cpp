#include <cmath>
#include <unordered_map>

#include "ldb/constructions.hpp"
#include "ldb/error.hpp"

namespace ldb {

namespace {

struct Collision {
  std::size_t first;
  std::size_t second;
  std::uint64_t code;
};

Collision find_collision(const PackingFamily& family, unsigned sigma, const Encoder& encoder) {
  if (sigma > 63) throw Error(ErrorKind::InvalidArgs, "sigma must be at most 63 bits");
  const std::uint64_t codes = std::uint64_t{1} << sigma;
  if (family.datasets.size() <= codes) {
    throw Error(ErrorKind::NoCollision,
                "family of " + std::to_string(family.datasets.size()) +
                    " members fits injectively into 2^" + std::to_string(sigma) + " codes");
  }
  std::unordered_map<std::uint64_t, std::size_t> seen;
  for (std::size_t i = 0; i < family.datasets.size(); ++i) {
    const std::uint64_t c = encoder(family.datasets[i]);
    if (c >= codes) throw Error(ErrorKind::InvalidArgs, "encoder output wider than sigma bits");
    auto [it, fresh] = seen.emplace(c, i);
    if (!fresh) return {it->second, i, c};
  }
  // Unreachable when the counting precondition holds.
  throw Error(ErrorKind::NoCollision, "no two members share a code");
}

void finish(PigeonholeWitness& w, const PackingFamily& family) {
  w.max_error = std::max(w.error_first, w.error_second);
  const double half = family.claimed_separation / 2.0;
  w.exceeds_half = family.rule == SeparationRule::Strict ? w.max_error > half : w.max_error >= half;
}

}  // namespace

PigeonholeWitness pigeonhole_witness(const PackingFamily& family, unsigned sigma,
                                     const Encoder& encoder, const DatasetDecoder& decoder,
                                     std::size_t samples, std::uint64_t seed) {
  const Collision c = find_collision(family, sigma, encoder);
  const Dataset shared = decoder(c.code);
  PigeonholeWitness w;
  w.first = c.first;
  w.second = c.second;
  w.code = c.code;
  const auto a = family_distance(family, family.datasets[c.first], shared, samples, derive_seed(seed, 1));
  const auto b = family_distance(family, family.datasets[c.second], shared, samples, derive_seed(seed, 2));
  // Report point estimates; the certificate machinery handles confidence.
  w.error_first = a.estimate;
  w.error_second = b.estimate;
  w.exact = a.method == CertMethod::Exact && b.method == CertMethod::Exact;
  finish(w, family);
  return w;
}

PigeonholeWitness pigeonhole_witness(const PackingFamily& family, unsigned sigma,
                                     const Encoder& encoder, const AnswerDecoder& decoder,
                                     const EvalConfig& cfg) {
  const Collision c = find_collision(family, sigma, encoder);
  const Predictor shared = [&decoder, code = c.code](const Query& q) { return decoder(code, q); };
  PigeonholeWitness w;
  w.first = c.first;
  w.second = c.second;
  w.code = c.code;
  w.error_first = model_error(family.datasets[c.first], family.op, shared, family.norm, cfg).value;
  w.error_second = model_error(family.datasets[c.second], family.op, shared, family.norm, cfg).value;
  w.exact = false;
  finish(w, family);
  return w;
}

}  // namespace ldb
