#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lwrfno/evaluation.hpp"
#include "lwrfno/godunov.hpp"
#include "lwrfno/io.hpp"
#include "lwrfno/rng.hpp"

using namespace lwrfno;

namespace {

const FundamentalDiagram kFd(120.0, 60.0);

}  // namespace

TEST_CASE("mae: basics and the loop oracle") {
  Tensor a = Tensor::full({5, 4}, 30.0);
  CHECK(mae(a, a) == 0.0);
  Tensor b = a;
  for (std::size_t k = 0; k < b.size(); ++k) b[k] += 1.0;
  CHECK(mae(b, a) == doctest::Approx(1.0));

  SplitMix64 rng(1);
  Tensor x({7, 9}), y({7, 9});
  for (std::size_t k = 0; k < x.size(); ++k) {
    x[k] = rng.uniform(0.0, 120.0);
    y[k] = rng.uniform(0.0, 120.0);
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) acc += std::abs(x[k] - y[k]);
  CHECK(mae(x, y) == doctest::Approx(acc / 63.0).epsilon(1e-14));
  CHECK_THROWS_AS(mae(x, Tensor({3, 3})), std::invalid_argument);
}

TEST_CASE("fit_trendline: exact recovery, flatness, homogeneity") {
  std::vector<int> classes{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};

  // exactly piecewise linear: recovers both segments
  std::vector<double> level_then_line;
  for (int c : classes) level_then_line.push_back(c <= 3 ? 5.0 : 5.0 + 0.141 * (c - 3));
  Trendline t = fit_trendline(classes, level_then_line, 3);
  CHECK(t.level == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(t.slope == doctest::Approx(0.141).epsilon(1e-12));

  // all constant: slope zero
  std::vector<double> flat(classes.size(), 2.5);
  Trendline f = fit_trendline(classes, flat, 3);
  CHECK(f.level == doctest::Approx(2.5));
  CHECK(f.slope == doctest::Approx(0.0));

  // homogeneity: scaling the errors scales level and slope
  std::vector<double> noisy;
  SplitMix64 rng(2);
  for (int c : classes) noisy.push_back(3.0 + 0.2 * c + rng.uniform(-0.1, 0.1));
  Trendline base = fit_trendline(classes, noisy, 3);
  std::vector<double> scaled;
  for (double v : noisy) scaled.push_back(7.0 * v);
  Trendline big = fit_trendline(classes, scaled, 3);
  CHECK(big.level == doctest::Approx(7.0 * base.level).epsilon(1e-12));
  CHECK(big.slope == doctest::Approx(7.0 * base.slope).epsilon(1e-12));

  // not enough points on one side
  std::vector<int> short_classes{0, 1, 2};
  std::vector<double> short_means{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(fit_trendline(short_classes, short_means, 1), std::invalid_argument);
}

TEST_CASE("oscillation_index: exact cases") {
  std::vector<double> truth{10, 10, 10, 60, 60, 60};
  CHECK(oscillation_index(truth, truth) == 0.0);

  // monotone prediction of a monotone truth: |TV difference|
  std::vector<double> smooth{10, 20, 30, 40, 50, 60};
  CHECK(oscillation_index(smooth, truth) == doctest::Approx(0.0));  // both TV 50
  std::vector<double> shallow{20, 20, 30, 40, 50, 50};
  CHECK(oscillation_index(shallow, truth) == doctest::Approx(20.0));

  // sawtooth noise on top of the truth is strictly positive
  std::vector<double> noisy = truth;
  for (std::size_t k = 0; k < noisy.size(); ++k) noisy[k] += (k % 2 ? 1.0 : -1.0);
  CHECK(oscillation_index(noisy, truth) > 0.0);
}

TEST_CASE("spearman: monotone and anti-monotone series") {
  std::vector<double> a{1, 2, 3, 4, 5, 6};
  std::vector<double> up{2, 9, 11, 15, 16, 40};
  std::vector<double> down{9, 7, 5, 3, 2, 1};
  CHECK(spearman(a, up) == doctest::Approx(1.0));
  CHECK(spearman(a, down) == doctest::Approx(-1.0));
  std::vector<double> one_swap{2, 9, 11, 16, 15, 40};
  CHECK(spearman(a, one_swap) > 0.8);
}

TEST_CASE("evaluate_classes: rows, recomputed means, zero-init sanity") {
  RunConfig cfg = desk_preset();
  FnoConfig mc = cfg.fno;
  FnoParams zero = zeros_like(init_params(mc, 1));

  EvalSetup setup;
  setup.axis = 'i';
  setup.sweep_classes = {0};
  setup.other_classes = {0, 1, 2};
  setup.samples_per_class = 6;
  setup.seed = 99;
  setup.model_tag = "fno";

  EvalReport single = evaluate_classes(zero, mc, cfg.fd, cfg.grid, setup);
  REQUIRE(single.rows.size() == 1);
  CHECK(single.rows[0].n == 6);
  // zero-init model predicts 0 everywhere; MAE stays within physical range
  CHECK(single.rows[0].mean_mae >= 0.0);
  CHECK(single.rows[0].mean_mae <= cfg.fd.u_max());
  // percent column is the fixed conversion of the veh/km column
  CHECK(single.rows[0].mean_mae_pct ==
        doctest::Approx(100.0 * single.rows[0].mean_mae / cfg.fd.u_max()));

  // mean of per-sample MAEs equals the row mean: recompute with the same seeds
  setup.sweep_classes = {0, 1};
  EvalReport two = evaluate_classes(zero, mc, cfg.fd, cfg.grid, setup);
  for (std::size_t row = 0; row < two.rows.size(); ++row) {
    double acc = 0.0;
    for (int s = 0; s < setup.samples_per_class; ++s) {
      Scenario sc = eval_scenario(setup, two.rows[row].class_index, s, cfg.fd, cfg.grid);
      DensityField truth = simulate(sc, cfg.fd, cfg.grid);
      // zero-init model: clamped prediction is exactly zero
      double m = 0.0;
      for (double v : truth.values) m += std::abs(v);
      acc += m / truth.values.size();
    }
    CHECK(two.rows[row].mean_mae == doctest::Approx(acc / setup.samples_per_class).epsilon(1e-12));
  }

  // evaluation scenarios come from the held-out namespace, never the train one
  CHECK(scenario_stream_seed(setup.seed, SeedNamespace::evaluation, 0) !=
        scenario_stream_seed(setup.seed, SeedNamespace::train, 0));
}

TEST_CASE("eval_scenario: nested families keep exact class structure") {
  RunConfig cfg = desk_preset();

  EvalSetup setup;
  setup.axis = 'i';
  setup.sweep_classes = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  setup.other_classes = {0, 1, 2};
  setup.seed = 77;
  for (int s = 0; s < 50; ++s) {
    std::vector<double> prev;
    int prev_bc = -1;
    for (int cls = 0; cls <= 9; ++cls) {
      Scenario sc = eval_scenario(setup, cls, s, cfg.fd, cfg.grid);
      CHECK(count_discontinuities(sc.ic) == cls);
      // the fixed axis is shared across the whole class sweep of a sample
      if (prev_bc >= 0) CHECK(sc.bc_class == prev_bc);
      prev_bc = sc.bc_class;
      // nesting: every discontinuity of the previous class persists
      if (!prev.empty()) {
        for (std::size_t i = 0; i + 1 < prev.size(); ++i)
          if (prev[i] != prev[i + 1]) CHECK(sc.ic[i] != sc.ic[i + 1]);
      }
      prev = sc.ic;
      for (double v : sc.ic) {
        CHECK(v >= 0.0);
        CHECK(v <= cfg.fd.u_max());
      }
    }
  }

  setup.axis = 'b';
  setup.sweep_classes = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  setup.other_classes = {0, 1, 2, 3};
  for (int s = 0; s < 50; ++s) {
    for (int cls = 0; cls <= 8; ++cls) {
      Scenario sc = eval_scenario(setup, cls, s, cfg.fd, cfg.grid);
      CHECK(count_pulses(sc.bc, cfg.fd.u_max()) == cls);
      CHECK(count_discontinuities(sc.ic) == sc.ic_class);
    }
  }

  // determinism
  Scenario a = eval_scenario(setup, 4, 11, cfg.fd, cfg.grid);
  Scenario b = eval_scenario(setup, 4, 11, cfg.fd, cfg.grid);
  CHECK(a.ic == b.ic);
  CHECK(a.bc == b.bc);
}

TEST_CASE("export_profiles: flat field, shock truth, row count") {
  RunConfig cfg = desk_preset();
  FnoParams zero = zeros_like(init_params(cfg.fno, 1));

  Scenario flat;
  flat.ic.assign(cfg.grid.nx, 40.0);
  flat.bc.assign(cfg.grid.nt, 0.0);
  std::vector<double> times{0.0, cfg.grid.t_len_s() / 2.0};
  auto rows = export_profiles(zero, cfg.fno, flat, times, cfg.fd, cfg.grid);
  CHECK(rows.size() == times.size() * static_cast<std::size_t>(cfg.grid.nx));
  for (std::size_t k = 0; k < static_cast<std::size_t>(cfg.grid.nx); ++k)
    CHECK(rows[k].u_true == doctest::Approx(40.0));

  // Riemann truth keeps exactly one jump in the initial profile
  Scenario shock;
  shock.ic.assign(cfg.grid.nx, 20.0);
  for (int i = cfg.grid.nx / 2; i < cfg.grid.nx; ++i) shock.ic[i] = 100.0;
  shock.bc.assign(cfg.grid.nt, 100.0);
  auto srows = export_profiles(zero, cfg.fno, shock, std::vector<double>{0.0}, cfg.fd, cfg.grid);
  int jumps = 0;
  for (std::size_t k = 0; k + 1 < srows.size(); ++k)
    if (srows[k].u_true != srows[k + 1].u_true) ++jumps;
  CHECK(jumps == 1);
}
