#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lwrfno/evaluation.hpp"
#include "lwrfno/fno.hpp"
#include "lwrfno/godunov.hpp"
#include "lwrfno/io.hpp"
#include "lwrfno/reference.hpp"
#include "lwrfno/tape.hpp"
#include "lwrfno/training.hpp"

namespace fs = std::filesystem;
using namespace lwrfno;

namespace {

void log_config(const RunConfig& cfg) {
  std::cout << "grid " << cfg.grid.nx << "x" << cfg.grid.nt << " (dx " << cfg.grid.dx_m
            << " m, dt " << cfg.grid.dt_s << " s), u_max " << cfg.fd.u_max()
            << " veh/km, v_max " << cfg.fd.v_max_kmh() << " km/h\n"
            << "model L=" << cfg.fno.n_layers << " width=" << cfg.fno.width << " modes=("
            << cfg.fno.modes_x << "," << cfg.fno.modes_t << ")\n"
            << "train mode=" << (cfg.train.mode == TrainMode::fno ? "fno" : "pi_fno")
            << " lambda=" << cfg.train.lambda << " epochs=" << cfg.train.epochs
            << " batch=" << cfg.train.batch_size << " lr=" << cfg.train.lr
            << " seed=" << cfg.train.seed << "\n"
            << "data classes i{";
  for (int c : cfg.data.ic_classes) std::cout << c << " ";
  std::cout << "} b{";
  for (int c : cfg.data.bc_classes) std::cout << c << " ";
  std::cout << "} x" << cfg.data.samples_per_class_pair << " seed=" << cfg.data.seed << "\n";
}

// "i0..i9", "b0,b3", "i4" -> axis + class list
std::pair<char, std::vector<int>> parse_classes(const std::string& spec) {
  if (spec.size() < 2 || (spec[0] != 'i' && spec[0] != 'b'))
    throw CLI::ValidationError("--classes", "expected i<k>, b<k>, a..b range or comma list");
  const char axis = spec[0];
  std::vector<int> classes;
  auto parse_one = [&](const std::string& tok) {
    if (tok.empty() || tok[0] != axis)
      throw CLI::ValidationError("--classes", "mixed or missing axis prefix in " + tok);
    return std::stoi(tok.substr(1));
  };
  const auto range_pos = spec.find("..");
  if (range_pos != std::string::npos) {
    const int lo = parse_one(spec.substr(0, range_pos));
    const int hi = parse_one(spec.substr(range_pos + 2));
    for (int c = lo; c <= hi; ++c) classes.push_back(c);
  } else {
    std::size_t start = 0;
    while (start < spec.size()) {
      auto comma = spec.find(',', start);
      if (comma == std::string::npos) comma = spec.size();
      classes.push_back(parse_one(spec.substr(start, comma - start)));
      start = comma + 1;
    }
  }
  return {axis, classes};
}

int run_gradcheck(bool verbose);

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LWR density-operator toolkit: Godunov data generation, spectral "
               "operator training and the generalization benchmark"};
  app.require_subcommand(1);

  // generate-data
  std::string gd_config, gd_out;
  auto* gd = app.add_subcommand("generate-data", "simulate a dataset and write it to a directory");
  gd->add_option("--config", gd_config, "JSON run configuration")->required();
  gd->add_option("--out", gd_out, "output dataset directory")->required();

  // train
  std::string tr_config, tr_data, tr_out;
  auto* tr = app.add_subcommand("train", "train a model on a generated dataset");
  tr->add_option("--config", tr_config, "JSON run configuration")->required();
  tr->add_option("--data", tr_data, "dataset directory")->required();
  tr->add_option("--out", tr_out, "checkpoint path stem (writes .json/.bin and loss CSV)")
     ->required();

  // lambda-sweep
  std::string ls_config, ls_data, ls_out = "lambda_sweep.csv";
  std::vector<double> ls_lambdas;
  auto* ls = app.add_subcommand("lambda-sweep",
                                "train one model per lambda and report validation error");
  ls->add_option("--config", ls_config, "JSON run configuration")->required();
  ls->add_option("--data", ls_data, "dataset directory")->required();
  ls->add_option("--out", ls_out, "per-lambda CSV path");
  ls->add_option("--lambdas", ls_lambdas, "lambda values (default 0,0.05,...,1.0)");

  // evaluate
  std::string ev_ckpt, ev_classes = "i0..i9", ev_out;
  int ev_samples = 50;
  std::uint64_t ev_seed = 1234;
  std::string ev_kind = "forward";
  auto* ev = app.add_subcommand("evaluate",
                                "per-class out-of-sample error and fitted trendline");
  ev->add_option("--ckpt", ev_ckpt, "checkpoint stem")->required();
  ev->add_option("--classes", ev_classes, "class sweep, e.g. i0..i9 or b0..b8");
  ev->add_option("--out", ev_out, "report path stem (.csv and .json)")->required();
  ev->add_option("--samples", ev_samples, "samples per class");
  ev->add_option("--seed", ev_seed, "held-out evaluation seed");
  ev->add_option("--kind", ev_kind, "forward or inverse");

  // simulate
  std::string sm_config, sm_out;
  int sm_ic = 1, sm_bc = 1;
  std::uint64_t sm_seed = 1;
  auto* sm = app.add_subcommand("simulate", "one Godunov run, written as raw f64 + JSON sidecar");
  sm->add_option("--config", sm_config, "JSON run configuration")->required();
  sm->add_option("--ic-class", sm_ic, "initial-condition class 0..9");
  sm->add_option("--bc-class", sm_bc, "boundary-condition class 0..8");
  sm->add_option("--seed", sm_seed, "scenario seed");
  sm->add_option("--out", sm_out, "output path stem")->required();

  // gradcheck
  bool gc_verbose = false;
  auto* gc = app.add_subcommand("gradcheck",
                                "finite-difference check of every parameter gradient");
  gc->add_flag("--verbose", gc_verbose, "print per-group errors");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gd) {
      RunConfig cfg = load_config(gd_config);
      log_config(cfg);
      Dataset ds = build_dataset(cfg.data, cfg.fd, cfg.grid);
      save_dataset(ds, gd_out);
      std::cout << "wrote " << ds.samples.size() << " samples to " << gd_out << "\n";
    } else if (*tr) {
      RunConfig cfg = load_config(tr_config);
      log_config(cfg);
      Dataset full = load_dataset(tr_data);
      auto [train_set, val_set] = split_validation(full, cfg.train.val_fraction, cfg.train.seed);
      std::cout << "train " << train_set.samples.size() << " / val " << val_set.samples.size()
                << " samples\n";
      FnoParams params = init_params(cfg.fno, cfg.train.seed);
      TrainResult result = train(cfg.fno, std::move(params), train_set, val_set, cfg.train);
      const LossReport& rep = result.report;
      for (std::size_t e = 0; e < rep.epochs.size(); ++e)
        if ((e + 1) % 10 == 0 || e + 1 == rep.epochs.size())
          std::cout << "epoch " << e + 1 << ": data " << rep.epochs[e].data_loss << " phys "
                    << rep.epochs[e].phys_loss << " val_mae " << rep.epochs[e].val_mae
                    << " veh/km\n";
      Checkpoint ckpt{cfg.fno, result.params, full.fd, full.grid, rep.best_epoch,
                      rep.best_val_mae, cfg.train.mode, cfg.train.effective_lambda()};
      save_checkpoint(ckpt, tr_out);
      write_loss_csv(rep, tr_out + "_loss.csv");
      std::cout << "best epoch " << rep.best_epoch << ", val MAE " << rep.best_val_mae
                << " veh/km -> " << tr_out << ".json\n";
    } else if (*ls) {
      RunConfig cfg = load_config(ls_config);
      log_config(cfg);
      if (ls_lambdas.empty())
        for (int k = 0; k <= 20; ++k) ls_lambdas.push_back(0.05 * k);
      Dataset full = load_dataset(ls_data);
      auto [train_set, val_set] = split_validation(full, cfg.train.val_fraction, cfg.train.seed);
      FnoParams init = init_params(cfg.fno, cfg.train.seed);
      SweepResult sweep =
          lambda_sweep(cfg.fno, init, train_set, val_set, ls_lambdas, cfg.train);
      std::ofstream f(ls_out);
      f << "lambda,val_mae,final_train_mae\n";
      for (const SweepRow& row : sweep.rows) {
        f << row.lambda << "," << row.val_mae << "," << row.final_train_mae << "\n";
        std::cout << "lambda " << row.lambda << ": val MAE " << row.val_mae << " veh/km\n";
      }
      std::cout << "best lambda " << sweep.best_lambda << " -> " << ls_out << "\n";
    } else if (*ev) {
      Checkpoint ckpt = load_checkpoint(ev_ckpt);
      auto [axis, classes] = parse_classes(ev_classes);
      EvalSetup setup;
      setup.axis = axis;
      setup.sweep_classes = classes;
      setup.other_classes = axis == 'i' ? std::vector<int>{0, 1, 2} : std::vector<int>{0, 1, 2, 3};
      setup.samples_per_class = ev_samples;
      setup.kind = ev_kind == "inverse" ? ScenarioKind::inverse : ScenarioKind::forward;
      setup.seed = ev_seed;
      setup.knot = axis == 'i' ? 3 : 2;
      setup.model_tag = ckpt.mode == TrainMode::fno ? "fno" : "pi_fno";
      EvalReport report = evaluate_classes(ckpt.params, ckpt.config, ckpt.fd, ckpt.grid, setup);
      for (const ClassRow& r : report.rows)
        std::cout << axis << r.class_index << ": MAE " << r.mean_mae << " +- " << r.std_mae
                  << " veh/km (" << r.mean_mae_pct << "%)\n";
      std::cout << "trendline level " << report.train_level << " veh/km, test slope "
                << report.test_slope << " veh/km per class\n";
      write_eval_csv(report, ev_out + ".csv");
      write_eval_json(report, ckpt.fd.u_max(), ev_out + ".json");
    } else if (*sm) {
      RunConfig cfg = load_config(sm_config);
      Scenario sc = make_scenario(sm_ic, sm_bc, ScenarioKind::forward, sm_seed, cfg.grid, cfg.fd);
      DensityField field = simulate(sc, cfg.fd, cfg.grid);
      write_field(Tensor({cfg.grid.nx, cfg.grid.nt}, field.values), cfg.grid, sm_out);
      std::cout << "wrote " << sm_out << ".f64 (" << cfg.grid.nx << "x" << cfg.grid.nt
                << ", seed " << sm_seed << ")\n";
    } else if (*gc) {
      return run_gradcheck(gc_verbose);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

namespace {

int run_gradcheck(bool verbose) {
  // tiny configuration exercises every op including both loss terms
  FundamentalDiagram fd(120.0, 60.0);
  GridSpec grid = GridSpec::make(6, 8, 100.0, 5.0, fd);
  FnoConfig cfg;
  cfg.n_layers = 2;
  cfg.width = 2;
  cfg.modes_x = 3;
  cfg.modes_t = 3;
  cfg.proj_hidden = 4;
  cfg.in_channels = 4;
  cfg.grid = grid;
  FnoParams params = init_params(cfg, 99);
  params.proj2_bias[0] = 0.35;  // keep the FD stencil clear of flux-law kinks

  Scenario sc = make_scenario(1, 1, ScenarioKind::forward, 31, grid, fd);
  Tensor encoded = encode_input(sc, grid, fd);
  DensityField truth = simulate(sc, fd, grid);
  Tensor target({grid.nx, grid.nt}, truth.values);
  for (std::size_t k = 0; k < target.size(); ++k) target[k] /= fd.u_max();
  const double lambda = 0.7;

  auto loss_value = [&](const FnoParams& p) {
    Tape tape;
    TapeBindings ids = build_forward(tape, encoded, p, cfg);
    const int data_term = tape.l2norm(tape.sub_const(ids.output, target));
    const int phys_term =
        tape.l2norm(tape.conservation_residual(tape.scale(ids.output, fd.u_max()), fd, grid));
    return tape.scalar_value(tape.add(data_term, tape.scale(phys_term, lambda)));
  };

  FnoParams grads = zeros_like(params);
  {
    Tape tape;
    TapeBindings ids = build_forward(tape, encoded, params, cfg);
    const int data_term = tape.l2norm(tape.sub_const(ids.output, target));
    const int phys_term =
        tape.l2norm(tape.conservation_residual(tape.scale(ids.output, fd.u_max()), fd, grid));
    tape.backward(tape.add(data_term, tape.scale(phys_term, lambda)));
    add_param_grads(tape, ids, grads);
  }

  const double h = 1e-5;
  double worst = 0.0;
  std::string worst_name;
  auto pv = param_views(params);
  auto gv = param_views(grads);
  for (std::size_t t = 0; t < pv.size(); ++t) {
    double group_worst = 0.0;
    for (std::size_t k = 0; k < pv[t].size; ++k) {
      const double save = pv[t].data[k];
      pv[t].data[k] = save + h;
      const double up = loss_value(params);
      pv[t].data[k] = save - h;
      const double dn = loss_value(params);
      pv[t].data[k] = save;
      const double fd_grad = (up - dn) / (2.0 * h);
      const double ad_grad = gv[t].data[k];
      const double rel = std::abs(ad_grad - fd_grad) /
                         std::max({std::abs(ad_grad), std::abs(fd_grad), 1e-6});
      group_worst = std::max(group_worst, rel);
    }
    if (verbose)
      std::cout << pv[t].name << ": max rel err " << group_worst << " over " << pv[t].size
                << " params\n";
    if (group_worst > worst) {
      worst = group_worst;
      worst_name = pv[t].name;
    }
  }
  std::cout << "gradcheck: worst relative error " << worst << " (" << worst_name << ")\n";
  if (worst > 1e-4) {
    std::cout << "gradcheck: FAIL (tolerance 1e-4)\n";
    return 1;
  }
  std::cout << "gradcheck: PASS\n";
  return 0;
}

}  // namespace
