#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ldb/bounds.hpp"
#include "ldb/constructions.hpp"
#include "ldb/cover.hpp"
#include "ldb/error.hpp"
#include "ldb/norms.hpp"
#include "ldb/query.hpp"

namespace py = pybind11;
using namespace ldb;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// 1-d arrays are single-attribute datasets; 2-d arrays are (n, d).
Dataset to_dataset(const Array& a) {
  if (a.ndim() == 1) {
    const std::size_t n = static_cast<std::size_t>(a.shape(0));
    if (n == 0) return empty_dataset(1);
    return Dataset(n, 1, std::vector<double>(a.data(), a.data() + n));
  }
  if (a.ndim() != 2) throw Error(ErrorKind::ShapeMismatch, "expected a 1-d or 2-d array");
  const auto n = static_cast<std::size_t>(a.shape(0));
  const auto d = static_cast<std::size_t>(a.shape(1));
  if (n == 0) return empty_dataset(d);
  return Dataset(n, d, std::vector<double>(a.data(), a.data() + n * d));
}

Array to_array(const Dataset& d) {
  Array out({static_cast<py::ssize_t>(d.size()), static_cast<py::ssize_t>(d.dims())});
  std::copy(d.values().begin(), d.values().end(), out.mutable_data());
  return out;
}

Dataset sorted_1d(const Array& a) {
  Dataset d = to_dataset(a);
  return d.is_sorted() || d.size() == 0 ? d : sort_dataset_1d(d);
}

py::object big(const BigInt& x) { return py::reinterpret_steal<py::object>(PyLong_FromString(x.str().c_str(), nullptr, 10)); }

BigInt from_py(const py::int_& x) { return BigInt(py::str(x).cast<std::string>()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Model-size bounds for learned database operations";

  py::register_exception<Error>(m, "LdbError", PyExc_ValueError);

  m.def(
      "bound_bits",
      [](const std::string& op, const std::string& norm, const std::string& side, std::uint64_t n,
         std::uint64_t d, double eps, std::optional<std::uint64_t> u) {
        const auto r = bound_bits({parse_op(op), parse_norm(norm), parse_side(side), n, d, eps, u});
        py::dict out;
        out["bits"] = r.bits;
        out["formula_id"] = to_string(r.formula);
        out["validity"] = to_string(r.validity);
        out["reason"] = r.reason;
        return out;
      },
      py::arg("op"), py::arg("norm"), py::arg("side"), py::arg("n"), py::arg("d") = 1, py::arg("eps"),
      py::arg("u") = py::none());

  m.def(
      "eps_star",
      [](double bits, const std::string& op, const std::string& norm, std::uint64_t n, std::uint64_t d,
         std::optional<std::uint64_t> u) {
        const auto r = eps_star(bits, parse_op(op), parse_norm(norm), n, d, u);
        py::dict out;
        out["eps_star"] = r.eps;
        out["flag"] = to_string(r.flag);
        out["formula_id"] = to_string(r.formula);
        out["eps_min"] = r.eps_min;
        out["eps_max"] = r.eps_max;
        return out;
      },
      py::arg("bits"), py::arg("op"), py::arg("norm"), py::arg("n"), py::arg("d") = 1,
      py::arg("u") = py::none());

  m.def(
      "covering_count_log2",
      [](const std::string& op, std::uint64_t n, std::uint64_t d, double eps) {
        return covering_count_log2(parse_op(op), n, d, eps);
      },
      py::arg("op"), py::arg("n"), py::arg("d"), py::arg("eps"));

  m.def("rank", [](const Array& data, double q) { return rank(sorted_1d(data), q); });
  m.def("cardinality", [](const Array& data, std::vector<double> c, std::vector<double> r) {
    return cardinality(to_dataset(data), RangeQuery{std::move(c), std::move(r)});
  });
  m.def("range_sum", [](const Array& data, std::vector<double> c, std::vector<double> r) {
    return range_sum(to_dataset(data), RangeQuery{std::move(c), std::move(r)});
  });

  m.def("rank_l1", [](const Array& a, const Array& b) { return rank_l1(sorted_1d(a), sorted_1d(b)); });
  m.def("rank_linf", [](const Array& a, const Array& b) { return rank_linf(sorted_1d(a), sorted_1d(b)); });
  m.def("card1d_l1", [](const Array& a, const Array& b) { return card1d_l1(to_dataset(a), to_dataset(b)); });
  m.def("card1d_linf", [](const Array& a, const Array& b) { return card1d_linf(to_dataset(a), to_dataset(b)); });
  m.def("sum1d_l1", [](const Array& a, const Array& b) { return sum1d_l1(to_dataset(a), to_dataset(b)); });
  m.def(
      "mc_l1",
      [](const std::string& op, const Array& a, const Array& b, std::size_t samples, std::uint64_t seed) {
        const auto r = mc_l1(parse_op(op), to_dataset(a), to_dataset(b), samples, seed);
        return py::make_tuple(r.value, r.std_error);
      },
      py::arg("op"), py::arg("a"), py::arg("b"), py::arg("samples") = 10000, py::arg("seed") = 0);

  m.def("sample_uniform", [](std::size_t n, std::size_t d, std::uint64_t seed) {
    return to_array(sample_uniform(n, d, seed));
  });
  m.def("quantize", [](const Array& data, std::uint64_t u) {
    const Dataset d = to_dataset(data);
    return to_array(quantize(d, GridSpec{u, d.dims()}));
  });

  py::class_<CoverCode>(m, "CoverCode")
      .def_property_readonly("op", [](const CoverCode& c) { return to_string(c.op); })
      .def_readonly("n", &CoverCode::n)
      .def_readonly("d", &CoverCode::d)
      .def_readonly("denominator", &CoverCode::denominator)
      .def_readonly("bit_length", &CoverCode::bit_length)
      .def_property("index", [](const CoverCode& c) { return big(c.index); },
                    [](CoverCode& c, const py::int_& v) { c.index = from_py(v); })
      .def("to_bytes", [](const CoverCode& c) {
        const auto b = serialize(c);
        return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
      })
      .def_static("from_bytes", [](const py::bytes& b) {
        const std::string s = b;
        return deserialize(std::vector<std::uint8_t>(s.begin(), s.end()));
      });

  m.def("cover_encode", [](const Array& data, double eps, const std::string& op) {
    const OpKind k = parse_op(op);
    return cover_encode(k == OpKind::Index ? sorted_1d(data) : to_dataset(data), eps, k);
  });
  m.def("cover_decode", [](const CoverCode& code) { return to_array(cover_decode(code)); });

  m.def(
      "certify",
      [](const std::string& construction, std::uint64_t n, double eps, std::uint64_t d,
         std::optional<std::uint64_t> u, const std::string& op, std::size_t count, std::size_t pairs,
         std::size_t samples, std::uint64_t seed) {
        PackingFamily fam;
        if (construction == "packing-linf") {
          if (!u) throw Error(ErrorKind::InvalidArgs, "packing-linf needs u");
          fam = packing_linf(parse_op(op), n, d, eps, *u, count, seed);
        } else if (construction == "packing-l1-index") {
          fam = packing_l1_index(n, eps, count, seed);
        } else if (construction == "packing-l1-ce") {
          fam = packing_l1_ce(n, d, eps, count, seed);
        } else if (construction == "packing-mu") {
          fam = packing_mu_index(n, eps, [](double x) { return x * x; }, count, seed);
        } else {
          throw Error(ErrorKind::InvalidArgs, "unknown construction '" + construction + "'");
        }
        const auto c = certify(fam, pairs, samples, seed);
        py::dict out;
        out["members"] = fam.datasets.size();
        out["claimed_separation"] = fam.claimed_separation;
        out["pairs_checked"] = c.pairs_checked;
        out["min_observed"] = c.min_observed;
        out["method"] = to_string(c.method);
        out["pass"] = c.pass;
        return out;
      },
      py::arg("construction"), py::arg("n"), py::arg("eps"), py::arg("d") = 1, py::arg("u") = py::none(),
      py::arg("op") = "index", py::arg("count") = 20, py::arg("pairs") = 50, py::arg("samples") = 2000,
      py::arg("seed") = 0);
}
