#include "ldb/cover.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "ldb/bounds.hpp"
#include "ldb/error.hpp"

namespace ldb {

namespace {

constexpr std::uint8_t kVersion = 0x01;
constexpr char kMagic[4] = {'L', 'D', 'B', 'C'};

std::uint64_t code_dims(OpKind op, const Dataset& data) {
  if (op == OpKind::Index) {
    if (data.dims() != 1) throw Error(ErrorKind::NotOneDimensional, "index cover needs 1-d data");
    return 1;
  }
  if (op == OpKind::RangeSum && data.dims() < 2) {
    throw Error(ErrorKind::DimensionMismatch, "range-sum cover needs d + 1 attributes");
  }
  return predicate_dims(op, data.dims());
}

void check_eps(const Dataset& data, double eps) {
  if (!(eps > 0.0) || eps > static_cast<double>(data.size())) {
    throw Error(ErrorKind::InvalidArgs, "cover needs 0 < eps <= n");
  }
}

CoverCode encode_cells(OpKind op, std::uint64_t n, std::uint64_t d, std::uint64_t denominator,
                       std::vector<std::uint64_t> cells) {
  std::sort(cells.begin(), cells.end());
  CoverCode code;
  code.op = op;
  code.n = n;
  code.d = d;
  code.denominator = denominator;
  code.index = multiset_rank(cells, cover_alphabet(op, d, denominator));
  code.bit_length = cover_bit_length(op, n, d, denominator);
  return code;
}

std::vector<std::uint64_t> decode_cells(const CoverCode& code) {
  const BigInt count = covering_count(code.op, code.n, code.d, code.denominator);
  if (code.index < 0 || code.index >= count) {
    throw Error(ErrorKind::IndexOutOfRange, "cover index is not below the cover size");
  }
  return multiset_unrank(code.index, code.n, cover_alphabet(code.op, code.d, code.denominator));
}

std::uint64_t record_columns(OpKind op, std::uint64_t d) {
  return op == OpKind::Index ? 1 : (op == OpKind::RangeSum ? d + 1 : d);
}

template <class T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

template <class T>
T get_le(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw Error(ErrorKind::IoError, "truncated cover file header");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(in[pos + i]) << (8 * i);
  pos += sizeof(T);
  return value;
}

}  // namespace

std::uint64_t record_cell(std::span<const double> record, std::uint64_t denominator) {
  std::uint64_t id = 0;
  for (double x : record) id = id * (denominator + 1) + grid_cell(x, denominator);
  return id;
}

std::uint64_t cover_bit_length(OpKind op, std::uint64_t n, std::uint64_t d,
                               std::uint64_t denominator) {
  return bit_length(covering_count(op, n, d, denominator) - 1);
}

CoverCode cover_encode(const Dataset& data, double eps, OpKind op) {
  const std::uint64_t d = code_dims(op, data);
  check_eps(data, eps);
  const std::uint64_t u = cover_denominator(data.size(), eps);
  std::vector<std::uint64_t> cells(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) cells[i] = record_cell(data.row(i), u);
  return encode_cells(op, data.size(), d, u, std::move(cells));
}

Dataset cover_decode(const CoverCode& code) {
  const auto cells = decode_cells(code);
  const std::uint64_t cols = record_columns(code.op, code.d);
  const std::uint64_t base = code.denominator + 1;
  std::vector<double> values(code.n * cols);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::uint64_t cell = cells[i];
    for (std::uint64_t j = cols; j-- > 0;) {
      values[i * cols + j] = grid_value(cell % base, code.denominator);
      cell /= base;
    }
  }
  return Dataset(code.n, cols, std::move(values));
}

CoverCode cover_encode_mu(const Dataset& data, double eps, const Cdf& cdf) {
  code_dims(OpKind::Index, data);
  check_eps(data, eps);
  const std::uint64_t u = cover_denominator(data.size(), eps);
  const auto grid = quantile_grid(cdf, u);
  std::vector<std::uint64_t> cells(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double x = data.at(i, 0);
    cells[i] = static_cast<std::uint64_t>(std::upper_bound(grid.begin(), grid.end(), x) - grid.begin()) - 1;
  }
  return encode_cells(OpKind::Index, data.size(), 1, u, std::move(cells));
}

Dataset cover_decode_mu(const CoverCode& code, const Cdf& cdf) {
  if (code.op != OpKind::Index) throw Error(ErrorKind::InvalidArgs, "mu cover codes are index codes");
  const auto cells = decode_cells(code);
  const auto grid = quantile_grid(cdf, code.denominator);
  std::vector<double> values(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) values[i] = grid[cells[i]];
  return Dataset(code.n, 1, std::move(values));
}

std::vector<std::uint8_t> serialize(const CoverCode& code) {
  if (code.d > 0xFFFF) throw Error(ErrorKind::InvalidArgs, "dimension does not fit the file header");
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(kVersion);
  out.push_back(static_cast<std::uint8_t>(code.op));
  put_le<std::uint64_t>(out, code.n);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(code.d));
  put_le<std::uint64_t>(out, code.denominator);
  const std::uint64_t payload = (code.bit_length + 7) / 8;
  if (payload > 0xFFFFFFFFULL) throw Error(ErrorKind::InvalidArgs, "payload does not fit the file header");
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(payload));
  std::vector<std::uint8_t> digits;
  if (code.index > 0) boost::multiprecision::export_bits(code.index, std::back_inserter(digits), 8);
  if (digits.size() > payload) throw Error(ErrorKind::IndexOutOfRange, "index wider than bit_length");
  out.insert(out.end(), payload - digits.size(), 0);
  out.insert(out.end(), digits.begin(), digits.end());
  return out;
}

CoverCode deserialize(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 6 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw Error(ErrorKind::IoError, "not a cover code file");
  }
  if (bytes[4] != kVersion) throw Error(ErrorKind::IoError, "unsupported cover code version");
  if (bytes[5] > 2) throw Error(ErrorKind::IoError, "unknown operation byte");
  CoverCode code;
  code.op = static_cast<OpKind>(bytes[5]);
  std::size_t pos = 6;
  code.n = get_le<std::uint64_t>(bytes, pos);
  code.d = get_le<std::uint16_t>(bytes, pos);
  code.denominator = get_le<std::uint64_t>(bytes, pos);
  const std::uint32_t payload = get_le<std::uint32_t>(bytes, pos);
  if (code.n < 1 || code.d < 1 || code.denominator < 1) throw Error(ErrorKind::IoError, "invalid cover header");
  if (bytes.size() != pos + payload) throw Error(ErrorKind::IoError, "payload length mismatch");
  code.bit_length = cover_bit_length(code.op, code.n, code.d, code.denominator);
  if (payload != (code.bit_length + 7) / 8) throw Error(ErrorKind::IoError, "payload length disagrees with cover size");
  code.index = 0;
  if (payload > 0) {
    boost::multiprecision::import_bits(code.index, bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end(), 8);
  }
  return code;
}

void write_code(const CoverCode& code, const std::filesystem::path& path) {
  const auto bytes = serialize(code);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

CoverCode read_code(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

Encoder truncated_cover_encoder(OpKind op, double eps, unsigned sigma) {
  if (sigma > 63) throw Error(ErrorKind::InvalidArgs, "sigma must be at most 63 bits");
  return [op, eps, sigma](const Dataset& data) {
    const CoverCode code = cover_encode(data, eps, op);
    BigInt top = code.index;
    if (code.bit_length > sigma) top >>= code.bit_length - sigma;
    return top.convert_to<std::uint64_t>();
  };
}

DatasetDecoder truncated_cover_decoder(OpKind op, std::uint64_t n, std::uint64_t d, double eps,
                                       unsigned sigma) {
  if (sigma > 63) throw Error(ErrorKind::InvalidArgs, "sigma must be at most 63 bits");
  const std::uint64_t u = cover_denominator(n, eps);
  const std::uint64_t bits = cover_bit_length(op, n, d, u);
  return [=](std::uint64_t value) {
    CoverCode code{op, n, d, u, BigInt(value), bits};
    if (bits > sigma) code.index <<= bits - sigma;
    return cover_decode(code);
  };
}

}  // namespace ldb
