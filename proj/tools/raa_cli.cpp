#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "raa/density.hpp"
#include "raa/search.hpp"
#include "raa/solver.hpp"

namespace {

struct RunConfig {
  std::string out_path;
  std::string format = "csv";
  unsigned shards = 1;
  std::string checkpoint_path;
  std::string log_level = "info";
  bool resume = false;
};

void log_info(const RunConfig& cfg, const std::string& msg) {
  if (cfg.log_level != "quiet") std::cerr << msg << "\n";
}

// Data goes to --out or stdout; diagnostics stay on stderr.
void write_output(const RunConfig& cfg, const std::string& text) {
  if (cfg.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + cfg.out_path);
  out << text;
}

nlohmann::json hit_to_json(const raa::SearchSpec& spec, const raa::Hit& h) {
  nlohmann::json j;
  j["n"] = h.n;
  j["kind"] = raa::to_string(spec.kind);
  switch (spec.kind) {
    case raa::ScanKind::NegativeR:
      j["r"] = "-" + std::to_string(spec.neg_m);
      break;
    case raa::ScanKind::RationalRCheck:
      j["r"] = std::to_string(spec.rat_num) + "/" + std::to_string(spec.rat_den);
      break;
    default:
      j["r"] = spec.r;
  }
  j["value_n"] = h.value_n;
  j["value_n1"] = h.value_n1;
  j["value_n2"] = h.value_n2;
  j["delta"] = h.delta;
  return j;
}

int emit_scan(const RunConfig& cfg, raa::SearchSpec spec) {
  spec.shard_count = cfg.shards;
  spec.checkpoint_path = cfg.checkpoint_path;
  spec.validate();

  if (spec.kind == raa::ScanKind::NegativeR) {
    log_info(cfg, "consecutive candidate pairs examined: " +
                      std::to_string(raa::negative_r_candidate_pairs(
                          spec.start, spec.end, spec.neg_m)));
  }

  if (cfg.format == "json") {
    auto hits = raa::run_scan(spec);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& h : hits) arr.push_back(hit_to_json(spec, h));
    write_output(cfg, arr.dump(2) + "\n");
    log_info(cfg, "hits: " + std::to_string(hits.size()));
    return 0;
  }

  if (!cfg.out_path.empty()) {
    auto result = raa::run(spec, cfg.out_path, cfg.resume);
    log_info(cfg, "hits so far: " + std::to_string(result.checkpoint.hits_so_far));
    return 0;
  }

  auto hits = raa::run_scan(spec);
  std::ostringstream os;
  os << raa::hits_csv_header();
  for (const auto& h : hits) os << raa::hit_csv_row(spec, h);
  write_output(cfg, os.str());
  log_info(cfg, "hits: " + std::to_string(hits.size()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Ruth-Aaron toolkit: scans, exponent solving, "
               "and density experiments"};
  app.require_subcommand(1);

  RunConfig cfg;
  app.add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--log-level", cfg.log_level, "quiet|info")
      ->check(CLI::IsMember({"quiet", "info"}));

  // ---- scan ----
  auto* scan = app.add_subcommand("scan", "Range scans");
  scan->require_subcommand(1);
  std::uint64_t start = 1, end = 1;
  unsigned r = 1, neg_m = 1;
  std::string coeffs_str;
  double near_c = 1.0, near_delta = -1.0;
  std::string near_k_str;
  std::uint64_t window_length = std::uint64_t(1) << 20;

  auto add_range_flags = [&](CLI::App* sub, bool with_r) {
    sub->add_option("--start", start, "Range start (inclusive)")->required();
    sub->add_option("--end", end, "Range end (inclusive)")->required();
    sub->add_option("--shards", cfg.shards, "Worker count");
    sub->add_option("--window", window_length, "Window length");
    sub->add_option("--checkpoint", cfg.checkpoint_path, "Checkpoint JSON path");
    sub->add_option("--out", cfg.out_path, "Hits file (CSV)");
    sub->add_flag("--resume", cfg.resume, "Resume from checkpoint");
    if (with_r) sub->add_option("--r", r, "Exponent r >= 1");
  };

  auto* sp = scan->add_subcommand("pairs", "f_r(n) = f_r(n+1)");
  add_range_flags(sp, true);
  auto* sn = scan->add_subcommand("near", "|f_r(n) - f_r(n+1)| <= k");
  add_range_flags(sn, true);
  sn->add_option("--near-k", near_k_str, "Constant threshold k");
  sn->add_option("--near-delta", near_delta, "Threshold exponent: k = floor(c * end^delta)");
  sn->add_option("--near-c", near_c, "Threshold coefficient c (with --near-delta)");
  auto* st = scan->add_subcommand("triples", "f(n) = f(n+1) = f(n+2)");
  add_range_flags(st, false);
  auto* sr = scan->add_subcommand("rabonacci", "f(n) = f(n-1) + f(n-2)");
  add_range_flags(sr, false);
  auto* sl = scan->add_subcommand("linear", "sum a_i f_r(n+i) = 0");
  add_range_flags(sl, true);
  sl->add_option("--coeffs", coeffs_str, "a0,a1,...")->required();
  auto* sm = scan->add_subcommand("negative-r", "f_{-m}(n) = f_{-m}(n+1), structural");
  add_range_flags(sm, false);
  sm->add_option("--neg-m", neg_m, "m >= 1 in r = -m");

  // ---- check rational-r ----
  auto* check = app.add_subcommand("check", "Structural checks");
  auto* cr = check->add_subcommand("rational-r", "Non-integer rational r sweep");
  long rat_num = 1, rat_den = 2;
  cr->add_option("--num", rat_num, "Numerator")->required();
  cr->add_option("--den", rat_den, "Denominator")->required();
  cr->add_option("--start", start, "Range start")->required();
  cr->add_option("--end", end, "Range end")->required();
  cr->add_option("--out", cfg.out_path, "Output path");

  // ---- solve-r ----
  auto* solve = app.add_subcommand("solve-r", "Ruth-Aaron exponent for n = p^2 - 1");
  std::uint64_t solve_p = 3;
  double tol = 1e-12;
  auto* p_opt = solve->add_option("--p", solve_p, "Prime p >= 3");
  solve->add_option("--tol", tol, "Residual tolerance");
  solve->add_option("--out", cfg.out_path, "Output path");
  std::uint64_t chain_start = 3, chain_count = 10, chain_bound = 100000;
  auto* chain = solve->add_subcommand("chain", "Strictly decreasing exponent chain");
  chain->add_option("--start-p", chain_start, "First prime")->required();
  chain->add_option("--count", chain_count, "Chain length")->required();
  chain->add_option("--bound", chain_bound, "Largest prime examined")->required();
  chain->add_option("--out", cfg.out_path, "Output path");

  // ---- density ----
  auto* density = app.add_subcommand("density", "Density and prime-sum experiments");
  density->require_subcommand(1);
  std::uint64_t dx = 1000000, dy = 3, du0 = 2, dv0 = 1000000, dcut = 100000000;
  std::uint64_t dterms = 1000000, dx1 = 1000, dx2 = 1000000, dt_int = 148;
  double dt = 0.5, ddelta = 0.05;
  unsigned dr = 1;
  std::string kgrid_str = "0,1,2,4,8";
  auto* da = density->add_subcommand("a", "Count of P(n) >= x^t");
  da->add_option("--x", dx)->required();
  da->add_option("--t", dt)->required();
  da->add_option("--out", cfg.out_path);
  auto* dpsi = density->add_subcommand("psi", "Count of y-smooth n <= x");
  dpsi->add_option("--x", dx)->required();
  dpsi->add_option("--y", dy)->required();
  dpsi->add_option("--out", cfg.out_path);
  auto* dpq = density->add_subcommand("pq-order", "Fraction with P(n) > P(n+1)");
  dpq->add_option("--x", dx)->required();
  dpq->add_option("--out", cfg.out_path);
  auto* drs = density->add_subcommand("ratio-spread", "P(n)/P(n+1) inside (x^-d, x^d)");
  drs->add_option("--x", dx)->required();
  drs->add_option("--delta", ddelta)->required();
  drs->add_option("--out", cfg.out_path);
  auto* ddom = density->add_subcommand("dominance", "P(n)^r <= f_r(n) < (1+x^-d) P(n)^r");
  ddom->add_option("--x", dx)->required();
  ddom->add_option("--r", dr)->required();
  ddom->add_option("--delta", ddelta)->required();
  ddom->add_option("--out", cfg.out_path);
  auto* dnc = density->add_subcommand("near-curve", "Counts of |f_r(n)-f_r(n+1)| <= k");
  dnc->add_option("--x", dx)->required();
  dnc->add_option("--r", dr)->required();
  dnc->add_option("--k-grid", kgrid_str, "k0,k1,...");
  dnc->add_option("--out", cfg.out_path);
  auto* dme = density->add_subcommand("mertens", "Sum of 1/p over a prime window");
  dme->add_option("--u0", du0)->required();
  dme->add_option("--v0", dv0)->required();
  dme->add_option("--out", cfg.out_path);
  auto* dpl = density->add_subcommand("plogp", "Tail sum of 1/(p log p)");
  dpl->add_option("--t", dt_int)->required();
  dpl->add_option("--cutoff", dcut)->required();
  dpl->add_option("--out", cfg.out_path);
  auto* dco = density->add_subcommand("constants", "Landau constant E three ways");
  dco->add_option("--terms", dterms);
  dco->add_option("--x1", dx1);
  dco->add_option("--x2", dx2);
  dco->add_option("--out", cfg.out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    auto parse_u64_list = [](const std::string& s) {
      std::vector<std::uint64_t> out;
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
      return out;
    };

    if (sp->parsed() || sn->parsed() || st->parsed() || sr->parsed() ||
        sl->parsed() || sm->parsed()) {
      raa::SearchSpec spec;
      spec.start = start;
      spec.end = end;
      spec.r = r;
      spec.window_length = window_length;
      if (sp->parsed()) spec.kind = raa::ScanKind::Pairs;
      if (sn->parsed()) {
        spec.kind = raa::ScanKind::Near;
        if (!near_k_str.empty() && near_delta >= 0.0)
          throw std::invalid_argument("near: give --near-k or --near-delta, not both");
        if (near_k_str.empty() && near_delta < 0.0)
          throw std::invalid_argument("near: one of --near-k / --near-delta required");
        if (!near_k_str.empty()) {
          spec.near.is_constant = true;
          spec.near.constant = std::stoull(near_k_str);
        } else {
          spec.near.is_constant = false;
          spec.near.c = near_c;
          spec.near.delta = near_delta;
        }
      }
      if (st->parsed()) spec.kind = raa::ScanKind::Triples;
      if (sr->parsed()) spec.kind = raa::ScanKind::Rabonacci;
      if (sl->parsed()) {
        spec.kind = raa::ScanKind::Linear;
        std::stringstream ss(coeffs_str);
        std::string item;
        while (std::getline(ss, item, ',')) spec.coeffs.push_back(std::stoll(item));
      }
      if (sm->parsed()) {
        spec.kind = raa::ScanKind::NegativeR;
        spec.neg_m = neg_m;
      }
      return emit_scan(cfg, spec);
    }

    if (cr->parsed()) {
      std::uint64_t equalities = 0;
      std::uint64_t unseparated = 0;
      for (std::uint64_t n = start; n <= end; ++n) {
        auto res = raa::rational_r_structural_check(n, rat_num, rat_den);
        if (res.possible) ++equalities;
        if (!res.separated) ++unseparated;
      }
      std::ostringstream os;
      os << "n_range,num,den,equalities,unseparated\n"
         << start << "-" << end << "," << rat_num << "," << rat_den << ","
         << equalities << "," << unseparated << "\n";
      write_output(cfg, os.str());
      if (unseparated > 0)
        std::cerr << "warning: " << unseparated
                  << " interval witnesses did not separate at working precision\n";
      return 0;
    }

    if (chain->parsed()) {
      auto res = raa::decreasing_r_sequence(chain_start, chain_count, chain_bound, tol);
      std::ostringstream os;
      os << raa::root_csv_header();
      for (const auto& rr : res.chain) os << raa::root_csv_row(rr);
      write_output(cfg, os.str());
      if (!res.complete)
        std::cerr << "shortfall: found " << res.chain.size() << " of "
                  << chain_count << " chain terms below bound\n";
      return 0;
    }
    if (solve->parsed()) {
      if (p_opt->count() == 0)
        throw std::invalid_argument("solve-r: --p required");
      auto rr = raa::solve_r(solve_p, tol);
      write_output(cfg, raa::root_csv_header() + raa::root_csv_row(rr));
      return 0;
    }

    auto emit_density = [&](const std::string& op, const raa::DensityRecord& rec,
                            double e1 = 0.0, double e2 = 0.0) {
      write_output(cfg, raa::density_csv_header() +
                            raa::density_csv_row(op, rec, e1, e2));
    };
    if (da->parsed()) {
      emit_density("a", raa::a_of_t(dx, dt));
      return 0;
    }
    if (dpsi->parsed()) {
      emit_density("psi", raa::psi(dx, dy));
      return 0;
    }
    if (dpq->parsed()) {
      emit_density("pq-order", raa::pq_order_fraction(dx));
      return 0;
    }
    if (drs->parsed()) {
      emit_density("ratio-spread", raa::ratio_spread(dx, ddelta));
      return 0;
    }
    if (ddom->parsed()) {
      emit_density("dominance", raa::dominance_fraction(dx, dr, ddelta));
      return 0;
    }
    if (dnc->parsed()) {
      auto recs = raa::near_density_curve(dx, dr, parse_u64_list(kgrid_str));
      std::ostringstream os;
      os << raa::density_csv_header();
      for (const auto& rec : recs) os << raa::density_csv_row("near-curve", rec);
      write_output(cfg, os.str());
      return 0;
    }
    if (dme->parsed()) {
      auto res = raa::mertens_window(du0, dv0);
      raa::DensityRecord rec{dv0, "u0", static_cast<double>(du0), 0, 0.0};
      std::ostringstream os;
      os << raa::density_csv_header();
      os.precision(17);
      os << "mertens," << dv0 << "," << du0 << ",0," << res.sum << ","
         << res.c_min << "," << (res.bound_ok ? 1 : 0) << "\n";
      write_output(cfg, os.str());
      return 0;
    }
    if (dpl->parsed()) {
      auto res = raa::plogp_tail(dt_int, dcut);
      std::ostringstream os;
      os << raa::density_csv_header();
      os.precision(17);
      os << "plogp," << dcut << "," << dt_int << ",0," << res.sum << ","
         << res.predicted << "," << res.abs_err << "\n";
      write_output(cfg, os.str());
      return 0;
    }
    if (dco->parsed()) {
      auto res = raa::landau_E(dx1, dx2, dterms);
      nlohmann::json j;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.10f", res.e_zeta);
      j["E_zeta"] = res.e_zeta;
      j["E_zeta_str"] = buf;
      j["E_series"] = res.e_series;
      j["slope"] = res.slope;
      write_output(cfg, j.dump(2) + "\n");
      return 0;
    }

    throw std::invalid_argument("no subcommand dispatched");
  } catch (const raa::CheckpointMismatch& e) {
    std::cerr << "checkpoint mismatch: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    std::cerr << app.help() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
