// Acceptance run: one [PASS]/[FAIL] line per criterion. Exit status is the
// number of failed criteria (capped at 1).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tropgrad/experiment.hpp"

using namespace tropgrad;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> normal_vec(CounterRng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

Dataset normal_dataset(CounterRng& rng, std::size_t n, std::size_t k) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < k; ++i) rows.push_back(normal_vec(rng, n));
  return Dataset::from_rows(rows);
}

// Tuned 7-method sweeps shared by several criteria.
struct TunedSweep {
  TuneResult tune;
  SweepResult sweep;
};

TunedSweep tuned_sweep(const Objective& obj, std::size_t n_inits, TuneGrid grid = {}) {
  SweepConfig cfg;
  cfg.seed = 42;
  cfg.steps = 1000;
  cfg.record_timing = false;
  TunedSweep out;
  out.tune = tune_rates(obj, cfg, grid);
  cfg.rates = out.tune.best;
  cfg.n_inits = n_inits;
  out.sweep = run_sweep(obj, cfg);
  return out;
}

double method_mean(const SweepResult& r, Method m) {
  for (const auto& s : r.summary) {
    if (s.method == m) return s.stats.mean;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

const Dataset& gaussian_6x10() {
  static const Dataset d = gaussian_dataset(6, 10, 1);
  return d;
}

const TunedSweep& linear_regression_sweep() {
  static const TunedSweep s = tuned_sweep(Objective::linear_regression(gaussian_6x10()), 50);
  return s;
}

// ---------------------------------------------------------------------------

Outcome ac1() {
  CounterRng rng(1001);
  double worst = 0.0;
  for (std::size_t n : {3, 6, 28}) {
    for (int i = 0; i < 1000; ++i) {
      const auto a = normal_vec(rng, n, 3.0), b = normal_vec(rng, n, 3.0);
      worst = std::max(worst, std::abs(static_cast<double>(n) * d_tr(a, b) - (d_tri_min(a, b) + d_tri_max(a, b))));
      worst = std::max(worst, std::abs(d_tri_min(a, b) - d_tri_max(b, a)));
    }
  }
  return {worst <= 1e-9, fmt("3000 pairs, max identity error %.2e", worst)};
}

Outcome ac2() {
  CounterRng rng(1002);
  int checked = 0, mismatches = 0;
  while (checked < 500) {
    const std::size_t n = 2 + rng.below(5);
    auto g = normal_vec(rng, n);
    if (rng.uniform() < 0.3) {
      for (double& v : g) v = std::round(v * 2);  // ties and zeros
    }
    bool neg = false, pos = false;
    for (double v : g) neg |= v < 0, pos |= v > 0;
    if (!neg || !pos) continue;
    ++checked;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask >> i & 1) s += g[i];
      }
      best = std::min(best, s);
    }
    const auto d = min_trop_direction(g);
    double gd = 0;
    for (std::size_t i = 0; i < n; ++i) gd += g[i] * d[i];
    mismatches += gd != best;
  }
  return {mismatches == 0, fmt("%d gradients, %d mismatches with brute force", checked, mismatches)};
}

Outcome ac3() {
  const auto fixture = TropPolytope({canonicalize(std::vector<double>{0, 0, 0}), canonicalize(std::vector<double>{0, 2, 4})});
  const double fixture_dist = dist_to_tconv(std::vector<double>{0, 3, 1}, fixture);
  CounterRng rng(1003);
  double worst = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(3), k = 1 + rng.below(5);
    std::vector<TropPoint> gens;
    for (std::size_t i = 0; i < k; ++i) gens.push_back(canonicalize(normal_vec(rng, n, 2.0)));
    const TropPolytope hull(gens);
    const auto t = normal_vec(rng, n, 3.0);
    const double dp = dist_to_tconv(t, hull);
    std::vector<double> c(k);
    for (int q = 0; q < 10000; ++q) {
      for (double& v : c) v = rng.uniform(-4.0, 4.0);
      worst = std::max(worst, dp - d_tr(t, trop_combination(c, hull)));
    }
  }
  const bool ok = std::abs(fixture_dist - 3.0) <= 1e-12 && worst <= 1e-6;
  return {ok, fmt("fixture distance %.6g, max excess over 1e6 hull samples %.2e", fixture_dist, worst)};
}

Outcome ac4() {
  CounterRng rng(1004);
  const auto x = normal_dataset(rng, 6, 10);
  const auto y = normal_dataset(rng, 3, 10);
  const auto part = contiguous_partition(6, 3);
  const std::vector<Objective> objs{Objective::fermat_weber(x),       Objective::frechet_mean(x),
                                    Objective::linear_regression(x),  Objective::wasserstein(x, y, part, 1.0),
                                    Objective::wasserstein(x, y, part, 2.0), Objective::wasserstein_inf(x, y, part)};
  double sum_err = 0, fd_err = 0;
  int a1_fail = 0;
  const double h = 1e-6;
  for (const auto& obj : objs) {
    for (int trial = 0; trial < 1000; ++trial) {
      const auto t = normal_vec(rng, 6, 2.0);
      const auto g = obj.subgradient(t);
      double s = 0;
      for (double v : g) s += v;
      sum_err = std::max(sum_err, std::abs(s));
      a1_fail += !check_assumption1(obj, t, g);
      if (trial < 200) {
        auto v = normal_vec(rng, 6);
        double mean = 0;
        for (double e : v) mean += e / 6;
        for (double& e : v) e -= mean;
        auto tp = t, tm = t;
        double gv = 0;
        for (std::size_t i = 0; i < 6; ++i) tp[i] += h * v[i], tm[i] -= h * v[i], gv += g[i] * v[i];
        fd_err = std::max(fd_err, std::abs((obj.value(tp) - obj.value(tm)) / (2 * h) - gv));
      }
    }
  }
  const bool ok = sum_err <= 1e-9 && fd_err <= 1e-5 && a1_fail == 0;
  return {ok, fmt("%zu objectives: max |sum g| %.1e, max FD error %.1e, assumption failures %d", objs.size(), sum_err,
                  fd_err, a1_fail)};
}

Outcome ac5() {
  std::size_t valid = 0, violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto x = gaussian_dataset(6, 1, seed);
    const auto obj = Objective::fermat_weber(x);
    RunOptions o;
    o.method = Method::TD;
    o.steps = 3000;
    o.optimizer.rate = 1.0;
    o.record_trajectory = true;
    const auto rec = run(obj, init_point(seed, 0, 6), o);
    const auto est = estimate_bound_params(std::span<const RunRecord>(&rec, 1), BoundParams{1.0, 1.0, 6.0, 1.0, 1.0});
    for (std::size_t m = 1; m <= 3000; ++m) {
      const auto b = epsilon_bound(m, est.params);
      if (!b.valid_prime) continue;
      ++valid;
      const double d = d_tr(rec.trajectory[m], x.row(0));
      violations += d > b.eps_prime;
      worst = std::max(worst, d - b.eps_prime);
    }
  }
  return {valid > 0 && violations == 0,
          fmt("5 runs, %zu valid steps, %zu above the bound (max d - eps' = %.3f)", valid, violations, worst)};
}

Outcome ac6() {
  const auto& s = linear_regression_sweep();
  const auto hull = gaussian_6x10().hull();
  std::size_t ok = 0, n = 0;
  for (const auto& r : s.sweep.runs) {
    if (r.method != Method::TD || r.failed) continue;
    ++n;
    ok += dist_to_tconv(r.record.final_t, hull) <= 0.05;
  }
  return {n == 50 && ok >= 48, fmt("TD rate %.4g: %zu/%zu runs within 0.05 of the hull", s.tune.best.at(Method::TD), ok, n)};
}

Outcome ac7() {
  const auto& s = linear_regression_sweep();
  const double td = method_mean(s.sweep, Method::TD), cd = method_mean(s.sweep, Method::CD);
  const double am = method_mean(s.sweep, Method::Adamax), tam = method_mean(s.sweep, Method::TrAdamax);
  const bool ok = td <= -4 && cd - td >= 2 && am - tam >= 1.5;
  return {ok, fmt("mean log error TD %.2f, CD %.2f, Adamax %.2f, TrAdamax %.2f", td, cd, am, tam)};
}

Outcome ac8() {
  const auto s = tuned_sweep(Objective::fermat_weber(gaussian_6x10()), 50);
  bool ok = true;
  std::string detail;
  for (Method m : {Method::CD, Method::TD, Method::Adam, Method::Adamax, Method::TrAdamax}) {
    const double v = method_mean(s.sweep, m);
    ok &= v <= -4;
    detail += fmt("%s %.2f, ", std::string(method_name(m)).c_str(), v);
  }
  const double tsgd = method_mean(s.sweep, Method::TSGD), td = method_mean(s.sweep, Method::TD);
  ok &= tsgd > td;
  detail += fmt("TSGD %.2f", tsgd);
  return {ok, detail};
}

Outcome ac9() {
  const auto obj = Objective::linear_regression(gaussian_6x10());
  SweepConfig cfg;
  cfg.seed = 42;
  cfg.steps = 3000;
  cfg.n_inits = 50;
  cfg.methods = {Method::TD};
  cfg.rates[Method::TD] = 1.0;
  cfg.record_trajectories = true;
  cfg.record_timing = false;
  const auto res = run_sweep(obj, cfg);
  double acc = 0;
  for (const auto& r : res.runs) {
    acc += rate_slope(r.record.trajectory, tail_mean(r.record.trajectory, 10), 100, 3000);
  }
  const double slope = acc / static_cast<double>(res.runs.size());
  return {slope >= -0.65 && slope <= -0.35, fmt("mean slope of log d_tr(t_m, t*) vs log m: %.3f", slope)};
}

Outcome ac10() {
  const std::vector<double> f{1.0, 0.8, 0.6};
  const auto inst = auction_dataset(f, 100, 0.05, 1);
  const auto s = tuned_sweep(Objective::linear_regression(inst.regression_data()), 100, TuneGrid{-10, 5, 10});
  const auto est = factor_estimates(s.sweep);
  const FactorEstimate *td = nullptr, *cd = nullptr;
  for (const auto& e : est) {
    if (e.method == Method::TD) td = &e;
    if (e.method == Method::CD) cd = &e;
  }
  bool ok = td && cd && td->runs == 100 && td->mean[0] == 1.0 && td->stddev[0] == 0.0;
  for (std::size_t i = 0; ok && i < 3; ++i) {
    ok &= std::abs(td->mean[i] - f[i]) <= 0.05;
    ok &= cd->stddev[i] > td->stddev[i];
  }
  if (!td || !cd) return {false, "missing TD or CD estimates"};
  return {ok, fmt("TD (%.3f±%.3f, %.3f±%.3f, %.3f±%.3f); CD std (%.3f, %.3f, %.3f)", td->mean[0], td->stddev[0],
                  td->mean[1], td->stddev[1], td->mean[2], td->stddev[2], cd->stddev[0], cd->stddev[1], cd->stddev[2])};
}

// Minimax path distance over all simple paths.
double minimax(const DistanceMatrix& d, std::size_t at, std::size_t target, double worst, std::vector<bool>& seen) {
  if (at == target) return worst;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t next = 0; next < d.size(); ++next) {
    if (seen[next]) continue;
    seen[next] = true;
    best = std::min(best, minimax(d, next, target, std::max(worst, d[at][next]), seen));
    seen[next] = false;
  }
  return best;
}

Outcome ac11() {
  const std::string target = "(((((F,E),(H,G)),(D,C)),B),A)";
  const double noise = 0.5;
  const auto species = demo_species_tree();
  const auto data = normalize_avg_trop_norm(gene_tree_dataset(species, 100, noise, 3));
  const auto s = tuned_sweep(Objective::fermat_weber(data), 100);
  std::size_t hits = 0;
  for (const auto& r : s.sweep.runs) {
    if (r.method == Method::TD && !r.failed) hits += topology_of_point(r.record.final_t, species.labels) == target;
  }

  CounterRng rng(1011);
  std::size_t matrices = 0, mismatches = 0;
  for (std::size_t n = 2; n <= 6; ++n) {
    for (int trial = 0; trial < 400; ++trial) {
      DistanceMatrix d(n, std::vector<double>(n, 0.0));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          const double v = trial % 3 == 0 ? std::floor(rng.uniform(0.0, 4.0)) : rng.uniform(0.0, 4.0);
          d[i][j] = d[j][i] = v;
        }
      }
      const auto u = single_linkage_ultrametric(d);
      ++matrices;
      bool same = true;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          std::vector<bool> seen(n, false);
          seen[i] = true;
          same &= u[i][j] == minimax(d, i, j, 0.0, seen);
        }
      }
      mismatches += !same;
    }
  }
  const bool ok = hits >= 90 && mismatches == 0;
  return {ok, fmt("noise %.2f: TD Fermat-Weber recovers the species topology in %zu/100 runs; "
                  "single linkage matches the minimax oracle on %zu/%zu matrices",
                  noise, hits, matrices - mismatches, matrices)};
}

Outcome ac12() {
  const auto x = gaussian_6x10();
  const auto y = gaussian_dataset(3, 10, 2);
  CounterRng rng(1012);
  std::size_t violations = 0, checked = 0;
  for (const auto& obj : {Objective::linear_regression(x), Objective::wasserstein_inf(x, y, contiguous_partition(6, 3))}) {
    for (int pair = 0; pair < 200; ++pair) {
      const auto a = normal_vec(rng, 6, 2.0), b = normal_vec(rng, 6, 2.0);
      const double bound = std::max(obj.value(a), obj.value(b));
      for (const auto& p : trop_segment_sample(a, b, 50, Convention::Min)) {
        ++checked;
        violations += obj.value(p) > bound + 1e-9;
      }
    }
  }
  return {violations == 0, fmt("%zu segment samples, %zu above max(f(a), f(b))", checked, violations)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria{
      {"AC1", "metric identities", 1, ac1},
      {"AC2", "tropical direction optimality", 1, ac2},
      {"AC3", "projection minimality", 60, ac3},
      {"AC4", "subgradients and assumption check", 10, ac4},
      {"AC5", "single-sample error bound", 5, ac5},
      {"AC6", "convergence to the hull", 120, ac6},
      {"AC7", "linear regression method ranking", 600, ac7},
      {"AC8", "Fermat-Weber method ranking", 300, ac8},
      {"AC9", "O(1/sqrt m) rate", 120, ac9},
      {"AC10", "auction factor recovery", 180, ac10},
      {"AC11", "species tree recovery", 300, ac11},
      {"AC12", "quasi-convexity on segments", 30, ac12},
  };
  std::printf("isa: %s\n", std::string(kernels::isa_name(kernels::active_isa())).c_str());
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("[%s] %s %s: %s (%.2fs of %.0fs)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.budget_seconds);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed ? 1 : 0;
}
