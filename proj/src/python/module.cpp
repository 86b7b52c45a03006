// Python bindings for the core operations: factorization, f_r evaluation,
// scans, the exponent solver, and the density experiments.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "raa/density.hpp"
#include "raa/fr.hpp"
#include "raa/search.hpp"
#include "raa/solver.hpp"

namespace py = pybind11;

namespace {

std::string fr_str(const raa::FrValue& v) { return v.to_string(); }

raa::PrimeFactorization factorize_one(std::uint64_t n) {
  if (n < 1) throw std::invalid_argument("factorize: n >= 1");
  auto window = raa::factorize_window(
      n, 1,
      raa::primes_up_to(
          static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n))) + 1));
  return window.factorizations[0];
}

py::object f_r(std::uint64_t n, py::object r) {
  auto fact = factorize_one(n);
  if (py::isinstance<py::int_>(r)) {
    long ri = r.cast<long>();
    if (ri >= 1) {
      auto v = raa::f_r_int(fact, static_cast<unsigned>(ri));
      return py::cast(v.int_value().get_str());
    }
    auto v = raa::f_r_negative(fact, static_cast<unsigned>(-ri));
    return py::cast(v.rat_value().get_str());
  }
  double rd = r.cast<double>();
  auto v = raa::f_r_real(fact, rd, 128);
  return py::make_tuple(v.real_value(), v.error_bound());
}

py::list hits_to_list(const raa::SearchSpec& spec,
                      const std::vector<raa::Hit>& hits) {
  py::list out;
  for (const auto& h : hits) {
    py::dict d;
    d["n"] = h.n;
    d["kind"] = raa::to_string(spec.kind);
    d["value_n"] = h.value_n;
    d["value_n1"] = h.value_n1;
    d["value_n2"] = h.value_n2;
    d["delta"] = h.delta;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(raatk, m) {
  m.doc() = "Generalized Ruth-Aaron toolkit bindings";

  m.def("is_prime", &raa::is_prime_u64, py::arg("n"));
  m.def("primes_up_to", &raa::primes_up_to, py::arg("limit"));
  m.def(
      "factorize",
      [](std::uint64_t n) {
        auto fact = factorize_one(n);
        py::list out;
        for (auto [p, a] : fact.factors) out.append(py::make_tuple(p, a));
        return out;
      },
      py::arg("n"));
  m.def("f_r", &f_r, py::arg("n"), py::arg("r") = 1,
        "f_r(n). Integer r: exact decimal (or num/den) string; real r: "
        "(midpoint, radius) of a rigorous enclosure.");

  m.def(
      "scan_pairs",
      [](std::uint64_t start, std::uint64_t end, unsigned r) {
        raa::SearchSpec spec;
        spec.kind = raa::ScanKind::Pairs;
        spec.start = start;
        spec.end = end;
        spec.r = r;
        return hits_to_list(spec, raa::run_scan(spec));
      },
      py::arg("start"), py::arg("end"), py::arg("r") = 1);
  m.def(
      "scan_near",
      [](std::uint64_t start, std::uint64_t end, unsigned r, std::uint64_t k) {
        raa::SearchSpec spec;
        spec.kind = raa::ScanKind::Near;
        spec.start = start;
        spec.end = end;
        spec.r = r;
        spec.near.is_constant = true;
        spec.near.constant = k;
        return hits_to_list(spec, raa::run_scan(spec));
      },
      py::arg("start"), py::arg("end"), py::arg("r"), py::arg("k"));
  m.def(
      "scan_triples",
      [](std::uint64_t start, std::uint64_t end) {
        raa::SearchSpec spec;
        spec.kind = raa::ScanKind::Triples;
        spec.start = start;
        spec.end = end;
        return hits_to_list(spec, raa::run_scan(spec));
      },
      py::arg("start"), py::arg("end"));
  m.def(
      "scan_rabonacci",
      [](std::uint64_t start, std::uint64_t end) {
        raa::SearchSpec spec;
        spec.kind = raa::ScanKind::Rabonacci;
        spec.start = start;
        spec.end = end;
        return hits_to_list(spec, raa::run_scan(spec));
      },
      py::arg("start"), py::arg("end"));
  m.def(
      "scan_linear",
      [](std::uint64_t start, std::uint64_t end,
         const std::vector<long long>& coeffs, unsigned r) {
        raa::SearchSpec spec;
        spec.kind = raa::ScanKind::Linear;
        spec.start = start;
        spec.end = end;
        spec.coeffs = coeffs;
        spec.r = r;
        return hits_to_list(spec, raa::run_scan(spec));
      },
      py::arg("start"), py::arg("end"), py::arg("coeffs"), py::arg("r") = 1);
  m.def("negative_r_candidates", &raa::negative_r_candidates, py::arg("limit"),
        py::arg("m"));
  m.def(
      "scan_negative_r",
      [](std::uint64_t start, std::uint64_t end, unsigned m) {
        raa::SearchSpec spec;
        spec.kind = raa::ScanKind::NegativeR;
        spec.start = start;
        spec.end = end;
        spec.neg_m = m;
        return hits_to_list(spec, raa::run_scan(spec));
      },
      py::arg("start"), py::arg("end"), py::arg("m") = 1);
  m.def(
      "check_rational_r",
      [](std::uint64_t n, long num, long den) {
        auto res = raa::rational_r_structural_check(n, num, den);
        py::dict d;
        d["possible"] = res.possible;
        d["separated"] = res.separated;
        d["witness_gap_lo"] = res.witness_gap_lo;
        return d;
      },
      py::arg("n"), py::arg("num"), py::arg("den"));

  m.def(
      "solve_r",
      [](std::uint64_t p, double tol) {
        auto rr = raa::solve_r(p, tol);
        py::dict d;
        d["p"] = rr.p;
        d["r_root"] = rr.r_root;
        d["bracket_lo"] = rr.bracket_lo;
        d["bracket_hi"] = rr.bracket_hi;
        d["iterations"] = rr.iterations;
        d["residual"] = rr.residual;
        d["excluded"] = rr.excluded;
        return d;
      },
      py::arg("p"), py::arg("tol") = 1e-12);
  m.def(
      "solve_r_chain",
      [](std::uint64_t start_p, std::size_t count, std::uint64_t bound) {
        auto res = raa::decreasing_r_sequence(start_p, count, bound);
        py::list chain;
        for (const auto& rr : res.chain)
          chain.append(py::make_tuple(rr.p, rr.r_root));
        return py::make_tuple(chain, res.complete);
      },
      py::arg("start_p"), py::arg("count"), py::arg("bound"));
  m.def("smooth_consecutive", &raa::smooth_consecutive, py::arg("limit"),
        py::arg("y") = 3, py::arg("include_unit") = false);

  auto rec_to_dict = [](const raa::DensityRecord& rec) {
    py::dict d;
    d["x"] = rec.x;
    d[py::str(rec.param_label)] = rec.param;
    d["count"] = rec.count;
    d["fraction"] = rec.fraction;
    return d;
  };
  m.def(
      "density_a",
      [rec_to_dict](std::uint64_t x, double t) {
        return rec_to_dict(raa::a_of_t(x, t));
      },
      py::arg("x"), py::arg("t"));
  m.def(
      "density_psi",
      [rec_to_dict](std::uint64_t x, std::uint64_t y) {
        return rec_to_dict(raa::psi(x, y));
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "pq_order",
      [rec_to_dict](std::uint64_t x) {
        return rec_to_dict(raa::pq_order_fraction(x));
      },
      py::arg("x"));
  m.def(
      "mertens",
      [](std::uint64_t u0, std::uint64_t v0) {
        auto res = raa::mertens_window(u0, v0);
        py::dict d;
        d["sum"] = res.sum;
        d["bound_ok"] = res.bound_ok;
        d["c_min"] = res.c_min;
        return d;
      },
      py::arg("u0"), py::arg("v0"));
  m.def(
      "landau_constants",
      [](std::uint64_t x1, std::uint64_t x2, std::uint64_t terms) {
        auto res = raa::landau_E(x1, x2, terms);
        py::dict d;
        d["E_zeta"] = res.e_zeta;
        d["E_series"] = res.e_series;
        d["slope"] = res.slope;
        return d;
      },
      py::arg("x1") = 1000, py::arg("x2") = 1000000,
      py::arg("terms") = 1000000);
}
