// Full acceptance suite. Each criterion prints exactly one PASS/FAIL line;
// the exit code is the number of failed criteria. The desk-scale training
// criteria (5-7, 9) dominate the runtime; everything is seeded and
// deterministic for a fixed thread count and identical across thread counts.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "lwrfno/evaluation.hpp"
#include "lwrfno/fft.hpp"
#include "lwrfno/fno.hpp"
#include "lwrfno/godunov.hpp"
#include "lwrfno/io.hpp"
#include "lwrfno/reference.hpp"
#include "lwrfno/rng.hpp"
#include "lwrfno/tape.hpp"
#include "lwrfno/training.hpp"

using namespace lwrfno;
using clock_type = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& detail, double seconds) {
  std::printf("criterion %d: %s (%s; %.1f s)\n", id, pass ? "PASS" : "FAIL", detail.c_str(),
              seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void run(int id, const std::function<std::pair<bool, std::string>()>& body) {
  const auto t0 = clock_type::now();
  bool pass = false;
  std::string detail;
  try {
    std::tie(pass, detail) = body();
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("exception: ") + e.what();
  }
  report(id, pass, detail, std::chrono::duration<double>(clock_type::now() - t0).count());
}

const FundamentalDiagram kFd(120.0, 60.0);

double shock_position(const DensityField& f, int j, double ul, double ur) {
  const double mid = 0.5 * (ul + ur);
  for (int i = 0; i + 1 < f.grid.nx; ++i) {
    const double a = f.at(i, j), b = f.at(i + 1, j);
    if (a <= mid && b > mid) return (i + 0.5 + (mid - a) / (b - a)) * f.grid.dx_m;
  }
  return -1.0;
}

Scenario riemann(double ul, double ur, const GridSpec& g) {
  Scenario s;
  s.ic.assign(g.nx, ul);
  for (int i = g.nx / 2; i < g.nx; ++i) s.ic[i] = ur;
  s.bc.assign(g.nt, ur);
  return s;
}

// ---- criterion 1: shock kinematics --------------------------------------

std::pair<bool, std::string> criterion1() {
  const auto t0 = clock_type::now();
  const GridSpec g = GridSpec::make(200, 301, 20.0, 1.0, kFd);  // 300 s horizon
  SplitMix64 rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    double ul, ur;
    do {
      ul = rng.uniform(0.0, 120.0);
      ur = rng.uniform(0.0, 120.0);
      if (ul > ur) std::swap(ul, ur);
    } while (ur - ul < 10.0 || std::abs(1.0 - (ul + ur) / 120.0) > 0.35);
    const DensityField f = simulate(riemann(ul, ur, g), kFd, g);
    const double speed = (kFd.flux_si(ul) - kFd.flux_si(ur)) / (ul - ur);
    const double x0 = shock_position(f, 0, ul, ur);
    const double expected = x0 + speed * 300.0;
    const double got = shock_position(f, g.nt - 1, ul, ur);
    worst = std::max(worst, std::abs(got - expected) / g.dx_m);
  }
  // equal-flux pair: the jump must not drift
  const DensityField fs = simulate(riemann(30.0, 90.0, g), kFd, g);
  const double drift =
      std::abs(shock_position(fs, g.nt - 1, 30.0, 90.0) - shock_position(fs, 0, 30.0, 90.0)) /
      g.dx_m;
  const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
  const bool pass = worst <= 1.0 && drift < 1.0 && secs < 5.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "max shock offset %.3f cells, stationary drift %.3f cells",
                worst, drift);
  return {pass, buf};
}

// ---- criterion 2: discrete conservation ----------------------------------

std::pair<bool, std::string> criterion2() {
  const auto t0 = clock_type::now();
  const GridSpec g = GridSpec::make(50, 601, 20.0, 1.0, kFd);  // 600 closed-boundary steps
  double worst = 0.0;
#pragma omp parallel for schedule(dynamic)
  for (int trial = 0; trial < 100; ++trial) {
    Scenario s;
    s.ic.resize(g.nx);
    SplitMix64 tr(7000 + trial);
    if (trial % 2 == 0)
      for (double& v : s.ic) v = tr.uniform(0.0, 120.0);  // rough random field
    else
      s.ic = gen_initial(static_cast<int>(tr.below(10)), tr, g, kFd);
    s.bc.assign(g.nt, 0.0);
    const DensityField f = simulate(s, kFd, g, BoundaryMode::closed);
    const double m0 = f.total_mass(0);
    double local_worst = 0.0;
    for (int j = 1; j < g.nt; ++j)
      local_worst = std::max(local_worst, std::abs(f.total_mass(j) - m0) / m0);
#pragma omp critical
    worst = std::max(worst, local_worst);
  }
  const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
  char buf[120];
  std::snprintf(buf, sizeof(buf), "worst relative mass drift %.2e", worst);
  return {worst < 1e-12 && secs < 10.0, buf};
}

// ---- criterion 3: conservation residual of solver output ------------------

std::pair<bool, std::string> criterion3() {
  const GridSpec g = desk_preset().grid;
  double worst = 0.0;
#pragma omp parallel for schedule(dynamic)
  for (int trial = 0; trial < 100; ++trial) {
    SplitMix64 rng(9000 + trial);
    Scenario s = make_scenario(static_cast<int>(rng.below(10)), static_cast<int>(rng.below(9)),
                               ScenarioKind::forward, rng.next_u64(), g, kFd);
    const DensityField f = simulate(s, kFd, g);
    const double loss = physics_loss(Tensor({g.nx, g.nt}, f.values), kFd, g);
#pragma omp critical
    worst = std::max(worst, loss);
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "max residual norm %.2e over 100 scenarios", worst);
  return {worst <= 1e-10, buf};
}

// ---- criterion 4: spectral core and gradients ------------------------------

std::pair<bool, std::string> criterion4() {
  const auto t0 = clock_type::now();
  // FFT round trip and Parseval on the working grid sizes
  double fft_worst = 0.0;
  for (auto [nx, nt] : {std::pair{32, 120}, std::pair{50, 600}}) {
    SplitMix64 rng(400 + nx);
    CTensor x({2, nx, nt});
    for (std::size_t k = 0; k < x.size(); ++k)
      x[k] = cplx{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    CTensor back = fft::ifft2(fft::fft2(x));
    double e_time = 0.0, e_freq = 0.0, rt = 0.0;
    CTensor X = fft::fft2(x);
    for (std::size_t k = 0; k < x.size(); ++k) {
      rt = std::max(rt, std::abs(back[k] - x[k]));
      e_time += std::norm(x[k]);
      e_freq += std::norm(X[k]);
    }
    fft_worst = std::max(fft_worst, rt);
    fft_worst = std::max(fft_worst, std::abs(e_time - e_freq / (nx * nt)) / e_time);
  }

  // finite-difference gradient check of the full model on a 4x8 grid
  const GridSpec g = GridSpec::make(4, 8, 100.0, 5.0, kFd);
  FnoConfig cfg;
  cfg.n_layers = 2;
  cfg.width = 2;
  cfg.modes_x = 2;
  cfg.modes_t = 3;
  cfg.proj_hidden = 3;
  cfg.in_channels = 4;
  cfg.grid = g;
  FnoParams params = init_params(cfg, 404);
  // bias the operating point into the smooth interior of the flux law so the
  // central differences never straddle a clamp or min() kink
  params.proj2_bias[0] = 0.35;
  SplitMix64 rng(405);
  Tensor encoded({4, g.nx, g.nt});
  for (std::size_t k = 0; k < encoded.size(); ++k) encoded[k] = rng.uniform(0.0, 1.0);
  Tensor target({1, g.nx, g.nt});
  for (std::size_t k = 0; k < target.size(); ++k) target[k] = rng.uniform(0.1, 0.9);
  const double lambda = 0.5;

  auto loss_of = [&](const FnoParams& p) {
    Tape tape;
    TapeBindings ids = build_forward(tape, encoded, p, cfg);
    const int data = tape.l2norm(tape.sub_const(ids.output, target));
    const int phys =
        tape.l2norm(tape.conservation_residual(tape.scale(ids.output, kFd.u_max()), kFd, g));
    return tape.scalar_value(tape.add(data, tape.scale(phys, lambda)));
  };
  FnoParams grads = zeros_like(params);
  {
    Tape tape;
    TapeBindings ids = build_forward(tape, encoded, params, cfg);
    const int data = tape.l2norm(tape.sub_const(ids.output, target));
    const int phys =
        tape.l2norm(tape.conservation_residual(tape.scale(ids.output, kFd.u_max()), kFd, g));
    tape.backward(tape.add(data, tape.scale(phys, lambda)));
    add_param_grads(tape, ids, grads);
  }
  double grad_worst = 0.0;
  auto pv = param_views(params);
  auto gv = param_views(grads);
  const double h = 1e-5;
  for (std::size_t t = 0; t < pv.size(); ++t)
    for (std::size_t k = 0; k < pv[t].size; ++k) {
      const double save = pv[t].data[k];
      pv[t].data[k] = save + h;
      const double up = loss_of(params);
      pv[t].data[k] = save - h;
      const double dn = loss_of(params);
      pv[t].data[k] = save;
      const double fd_grad = (up - dn) / (2.0 * h);
      grad_worst = std::max(grad_worst,
                            std::abs(gv[t].data[k] - fd_grad) /
                                std::max({std::abs(gv[t].data[k]), std::abs(fd_grad), 1e-6}));
    }
  const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
  char buf[160];
  std::snprintf(buf, sizeof(buf), "fft err %.2e, worst grad rel err %.2e", fft_worst,
                grad_worst);
  return {fft_worst <= 1e-10 && grad_worst <= 1e-4 && secs < 60.0, buf};
}

// ---- desk-scale training shared by criteria 5-7 ---------------------------

struct DeskRun {
  RunConfig cfg = desk_preset();
  Dataset train_set;
  Dataset val_set;
  TrainResult result;
  DeskRun() : train_set(cfg.grid, cfg.fd, cfg.data), val_set(cfg.grid, cfg.fd, cfg.data) {}
};

DeskRun desk_training_run() {
  DeskRun run;
  DatasetSpec spec = run.cfg.data;  // i0-3 x b0-2, 20 per pair = 240 samples
  run.train_set = build_dataset(spec, run.cfg.fd, run.cfg.grid, SeedNamespace::train);
  DatasetSpec val_spec = spec;
  val_spec.samples_per_class_pair = 2;  // 24 held-out validation fields
  run.val_set = build_dataset(val_spec, run.cfg.fd, run.cfg.grid, SeedNamespace::validation);
  FnoParams init = init_params(run.cfg.fno, run.cfg.train.seed);
  run.result = train(run.cfg.fno, std::move(init), run.train_set, run.val_set, run.cfg.train);
  return run;
}

std::pair<bool, std::string> criterion5(const DeskRun& run, double secs) {
  const LossReport& rep = run.result.report;
  if (rep.epochs.size() != 100) return {false, "expected 100 epochs"};
  const double first = rep.epochs.front().train_mae;
  const double last = rep.epochs.back().train_mae;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "train MAE epoch1 %.2f -> epoch100 %.2f veh/km (bound %.1f, half %.2f)", first,
                last, 0.1 * kFd.u_max(), 0.5 * first);
  const bool pass = last < 0.1 * kFd.u_max() && last < 0.5 * first && secs < 1800.0;
  return {pass, buf};
}

std::pair<bool, std::string> criterion6(const DeskRun& run) {
  EvalSetup setup;
  setup.axis = 'i';
  setup.sweep_classes = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  setup.other_classes = {0, 1, 2};
  setup.samples_per_class = 20;
  setup.seed = 606;
  setup.knot = 3;
  setup.model_tag = "pi_fno";
  EvalReport rep =
      evaluate_classes(run.result.params, run.cfg.fno, run.cfg.fd, run.cfg.grid, setup);

  std::vector<double> cls, err;
  for (const ClassRow& row : rep.rows)
    if (row.class_index >= 4) {
      cls.push_back(row.class_index);
      err.push_back(row.mean_mae);
    }
  const double rho = spearman(cls, err);
  char buf[200];
  std::snprintf(buf, sizeof(buf), "test slope %.3f veh/km per class, spearman %.2f",
                rep.test_slope, rho);
  return {rep.test_slope > 0.0 && rho >= 0.8, buf};
}

std::pair<bool, std::string> criterion7(const DeskRun& desk) {
  // one sweep over {0, 0.5, 1.0, 2.0} with identical init, seeds and data;
  // shorter budget than criterion 5 but the same pipeline
  TrainConfig tc = desk.cfg.train;
  tc.epochs = 40;
  FnoParams init = init_params(desk.cfg.fno, tc.seed);
  SweepResult sweep = lambda_sweep(desk.cfg.fno, init, desk.train_set, desk.val_set,
                                   {0.0, 0.5, 1.0, 2.0}, tc);

  const TrainResult* baseline = nullptr;  // lambda = 0
  const TrainResult* informed = nullptr;  // best positive lambda by validation MAE
  double informed_lambda = 0.0, best_mae = 1e300;
  for (std::size_t k = 0; k < sweep.rows.size(); ++k) {
    if (sweep.rows[k].lambda == 0.0) baseline = &sweep.runs[k];
    else if (sweep.rows[k].val_mae < best_mae) {
      best_mae = sweep.rows[k].val_mae;
      informed = &sweep.runs[k];
      informed_lambda = sweep.rows[k].lambda;
    }
  }
  if (!baseline || !informed) return {false, "sweep missing runs"};

  const GridSpec& g = desk.cfg.grid;
  const FundamentalDiagram& fd = desk.cfg.fd;
  const FnoConfig& mc = desk.cfg.fno;

  // (a) mean conservation residual of predictions on fresh test scenarios
  auto mean_phys = [&](const FnoParams& params) {
    double total = 0.0;
    const int n = 60;
#pragma omp parallel for schedule(dynamic) reduction(+ : total)
    for (int s = 0; s < n; ++s) {
      SplitMix64 rng(scenario_stream_seed(707, SeedNamespace::evaluation, s));
      Scenario sc;
      sc.ic = gen_initial(static_cast<int>(rng.below(4)), rng, g, fd);
      sc.bc = gen_boundary(static_cast<int>(rng.below(3)), rng, g, fd);
      Tensor encoded = encode_input(sc, g, fd);
      Tensor pred = predict_normalized(encoded, params, mc);
      for (std::size_t k = 0; k < pred.size(); ++k) pred[k] *= fd.u_max();
      total += physics_loss(pred, fd, g);
    }
    return total / n;
  };

  // (b) spurious oscillation across 20 entropy-shock profiles at mid-horizon
  auto mean_osc = [&](const FnoParams& params) {
    double total = 0.0;
    const int n = 20;
#pragma omp parallel for schedule(dynamic) reduction(+ : total)
    for (int s = 0; s < n; ++s) {
      SplitMix64 rng(scenario_stream_seed(708, SeedNamespace::evaluation, s));
      double ul, ur;
      do {
        ul = rng.uniform(5.0, 115.0);
        ur = rng.uniform(5.0, 115.0);
        if (ul > ur) std::swap(ul, ur);
      } while (ur - ul < 20.0 || std::abs(1.0 - (ul + ur) / 120.0) > 0.2);
      Scenario sc = riemann(ul, ur, g);
      sc.ic_class = 1;
      DensityField truth = simulate(sc, fd, g);
      Tensor encoded = encode_input(sc, g, fd);
      Tensor pred = predict_normalized(encoded, params, mc);
      const int j = g.nt / 2;
      std::vector<double> p(g.nx), t(g.nx);
      for (int i = 0; i < g.nx; ++i) {
        p[i] = std::clamp(pred[static_cast<std::size_t>(i) * g.nt + j] * fd.u_max(), 0.0,
                          fd.u_max());
        t[i] = truth.at(i, j);
      }
      total += oscillation_index(p, t);
    }
    return total / n;
  };

  const double phys_base = mean_phys(baseline->params);
  const double phys_info = mean_phys(informed->params);
  const double osc_base = mean_osc(baseline->params);
  const double osc_info = mean_osc(informed->params);

  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "lambda %.1f vs 0: phys %.3f vs %.3f, oscillation %.1f vs %.1f veh/km",
                informed_lambda, phys_info, phys_base, osc_info, osc_base);
  return {phys_info < phys_base && osc_info < osc_base, buf};
}

// ---- criterion 8: scenario oracles and dataset determinism ----------------

std::pair<bool, std::string> criterion8() {
  const GridSpec g = desk_preset().grid;
  SplitMix64 rng(808);
  for (int cls = 0; cls <= 9; ++cls)
    for (int draw = 0; draw < 1000; ++draw)
      if (count_discontinuities(gen_initial(cls, rng, g, kFd)) != cls)
        return {false, "initial-condition class count mismatch"};
  for (int cls = 0; cls <= 8; ++cls)
    for (int draw = 0; draw < 1000; ++draw)
      if (count_pulses(gen_boundary(cls, rng, g, kFd), kFd.u_max()) != cls)
        return {false, "boundary class count mismatch"};

  DatasetSpec spec;
  spec.ic_classes = {0, 1, 2, 3};
  spec.bc_classes = {0, 1, 2};
  spec.samples_per_class_pair = 2;
  spec.seed = 880;
  namespace fs = std::filesystem;
  const fs::path d1 = fs::temp_directory_path() / "lwrfno_acc_ds1";
  const fs::path d2 = fs::temp_directory_path() / "lwrfno_acc_ds2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  save_dataset(build_dataset(spec, kFd, g), d1);
  save_dataset(build_dataset(spec, kFd, g), d2);
  for (const auto& entry : fs::directory_iterator(d1)) {
    std::ifstream a(entry.path(), std::ios::binary), b(d2 / entry.path().filename(),
                                                        std::ios::binary);
    std::vector<char> ba((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::vector<char> bb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    if (ba != bb) return {false, "regenerated dataset differs: " + entry.path().filename().string()};
  }
  return {true, "10x1000 initial + 9x1000 boundary draws exact, datasets byte-identical"};
}

// ---- criterion 9: inverse problem ------------------------------------------

std::pair<bool, std::string> criterion9() {
  RunConfig cfg = desk_preset();
  DatasetSpec spec = cfg.data;
  spec.kind = ScenarioKind::inverse;
  spec.n_trajectories = 10;
  Dataset train_set = build_dataset(spec, cfg.fd, cfg.grid, SeedNamespace::train);
  DatasetSpec val_spec = spec;
  val_spec.samples_per_class_pair = 2;
  Dataset val_set = build_dataset(val_spec, cfg.fd, cfg.grid, SeedNamespace::validation);

  TrainConfig tc = cfg.train;
  tc.epochs = 40;
  FnoParams init = init_params(cfg.fno, tc.seed);
  TrainResult run = train(cfg.fno, std::move(init), train_set, val_set, tc);

  // constant predictor baseline: the mean training density
  double mean_density = 0.0;
  std::size_t cells = 0;
  for (const Sample& s : train_set.samples) {
    for (std::size_t k = 0; k < s.field.size(); ++k) mean_density += s.field[k];
    cells += s.field.size();
  }
  mean_density /= static_cast<double>(cells);

  const GridSpec& g = cfg.grid;
  double model_mae = 0.0, baseline_mae = 0.0;
  const int n = 48;
#pragma omp parallel for schedule(dynamic) reduction(+ : model_mae, baseline_mae)
  for (int s = 0; s < n; ++s) {
    SplitMix64 rng(scenario_stream_seed(909, SeedNamespace::evaluation, s));
    Scenario sc;
    sc.ic = gen_initial(static_cast<int>(rng.below(4)), rng, g, cfg.fd);
    sc.bc = gen_boundary(static_cast<int>(rng.below(3)), rng, g, cfg.fd);
    sc.kind = ScenarioKind::inverse;
    DensityField truth = simulate(sc, cfg.fd, g);
    sc.obs_mask = gen_observations(truth, 10, rng, cfg.fd);
    Tensor truth_t({g.nx, g.nt}, truth.values);
    Tensor encoded = encode_input(sc, g, cfg.fd, &truth_t);
    Tensor pred = predict_normalized(encoded, run.params, cfg.fno);
    double pm = 0.0, bm = 0.0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
      pm += std::abs(std::clamp(pred[k] * cfg.fd.u_max(), 0.0, cfg.fd.u_max()) - truth_t[k]);
      bm += std::abs(mean_density - truth_t[k]);
    }
    model_mae += pm / static_cast<double>(pred.size());
    baseline_mae += bm / static_cast<double>(pred.size());
  }
  model_mae /= n;
  baseline_mae /= n;

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "inverse MAE %.2f veh/km vs constant-predictor %.2f (need <= %.2f)", model_mae,
                baseline_mae, 0.8 * baseline_mae);
  const bool pass = std::isfinite(model_mae) && model_mae <= 0.8 * baseline_mae;
  return {pass, buf};
}

}  // namespace

int main() {
  run(1, criterion1);
  run(2, criterion2);
  run(3, criterion3);
  run(4, criterion4);

  // criteria 5 and 6 share one training run
  {
    const auto t0 = clock_type::now();
    DeskRun desk = desk_training_run();
    const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
    bool pass;
    std::string detail;
    std::tie(pass, detail) = criterion5(desk, secs);
    report(5, pass, detail, secs);
    run(6, [&] { return criterion6(desk); });
    run(7, [&] { return criterion7(desk); });
  }

  run(8, criterion8);
  run(9, criterion9);

  std::printf("acceptance: %d of 9 criteria passed\n", 9 - g_failures);
  return g_failures;
}
