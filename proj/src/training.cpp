#include "lwrfno/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lwrfno/kernels.hpp"
#include "lwrfno/rng.hpp"
#include "lwrfno/tape.hpp"

namespace lwrfno {

namespace {

double l2_norm(const Tensor& t) {
  double s = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) s += t[k] * t[k];
  return std::sqrt(s);
}

Tensor normalized(const Tensor& field_veh_km, double u_max) {
  Tensor t = field_veh_km;
  const double inv = 1.0 / u_max;
  for (std::size_t k = 0; k < t.size(); ++k) t[k] *= inv;
  return t;
}

double mean_abs_diff_clamped(const Tensor& pred_norm, const Tensor& target_veh_km,
                             double u_max) {
  double s = 0.0;
  for (std::size_t k = 0; k < pred_norm.size(); ++k) {
    const double p = std::clamp(pred_norm[k] * u_max, 0.0, u_max);
    s += std::abs(p - target_veh_km[k]);
  }
  return s / static_cast<double>(pred_norm.size());
}

}  // namespace

double data_loss(const std::vector<Tensor>& pred_norm, const std::vector<Tensor>& target_norm) {
  if (pred_norm.size() != target_norm.size())
    throw std::invalid_argument("data_loss: batch size mismatch");
  double total = 0.0;
  for (std::size_t s = 0; s < pred_norm.size(); ++s) {
    if (pred_norm[s].size() != target_norm[s].size())
      throw std::invalid_argument("data_loss: field size mismatch");
    double acc = 0.0;
    for (std::size_t k = 0; k < pred_norm[s].size(); ++k) {
      const double d = pred_norm[s][k] - target_norm[s][k];
      acc += d * d;
    }
    total += std::sqrt(acc);
  }
  return total;
}

double physics_loss(const Tensor& field_veh_km, const FundamentalDiagram& fd,
                    const GridSpec& grid) {
  return l2_norm(conservation_residual(field_veh_km, fd, grid));
}

double total_loss(const std::vector<Tensor>& pred_veh_km,
                  const std::vector<Tensor>& target_veh_km, const TrainConfig& config,
                  const FundamentalDiagram& fd, const GridSpec& grid) {
  std::vector<Tensor> pn, tn;
  pn.reserve(pred_veh_km.size());
  tn.reserve(target_veh_km.size());
  for (const auto& p : pred_veh_km) pn.push_back(normalized(p, fd.u_max()));
  for (const auto& t : target_veh_km) tn.push_back(normalized(t, fd.u_max()));
  double loss = data_loss(pn, tn);
  const double lambda = config.effective_lambda();
  if (lambda > 0.0)
    for (const auto& p : pred_veh_km) loss += lambda * physics_loss(p, fd, grid);
  return loss;
}

AdamState make_adam_state(const FnoParams& params) {
  AdamState st;
  st.m = zeros_like(params);
  st.v = zeros_like(params);
  st.step = 0;
  return st;
}

void adam_step(FnoParams& params, FnoParams& grads, AdamState& state, double lr,
               double beta1, double beta2, double eps) {
  state.step += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));

  auto pv = param_views(params);
  auto gv = param_views(grads);
  auto mv = param_views(state.m);
  auto vv = param_views(state.v);
  for (std::size_t t = 0; t < pv.size(); ++t) {
    double* p = pv[t].data;
    const double* g = gv[t].data;
    double* m = mv[t].data;
    double* v = vv[t].data;
    for (std::size_t k = 0; k < pv[t].size; ++k) {
      m[k] = beta1 * m[k] + (1.0 - beta1) * g[k];
      v[k] = beta2 * v[k] + (1.0 - beta2) * g[k] * g[k];
      const double m_hat = m[k] / bc1;
      const double v_hat = v[k] / bc2;
      p[k] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

namespace {

struct SampleStats {
  double data = 0.0;
  double phys = 0.0;
  double mae = 0.0;
};

// loss graph for one sample: ||pred - target|| (normalized) + lambda * ||residual||;
// gradients land in the caller's preallocated accumulator
SampleStats run_sample(const Sample& sample, const FnoParams& params,
                       const FnoConfig& mc, const FundamentalDiagram& fd,
                       const GridSpec& grid, double lambda, FnoParams* grads) {
  Tape tape;
  TapeBindings ids = build_forward(tape, sample.input, params, mc);

  const double u_max = fd.u_max();
  Tensor target_norm = normalized(sample.field, u_max);
  const int diff = tape.sub_const(ids.output, target_norm);
  const int data_term = tape.l2norm(diff);

  int loss = data_term;
  int phys_term = -1;
  if (lambda > 0.0) {
    const int veh_km = tape.scale(ids.output, u_max);
    phys_term = tape.l2norm(tape.conservation_residual(veh_km, fd, grid));
    loss = tape.add(data_term, tape.scale(phys_term, lambda));
  }

  SampleStats out;
  out.data = tape.scalar_value(data_term);
  if (phys_term >= 0) {
    out.phys = tape.scalar_value(phys_term);
  } else {
    // not part of the objective, still reported
    Tensor pred_veh_km = tape.value(ids.output);
    for (std::size_t k = 0; k < pred_veh_km.size(); ++k) pred_veh_km[k] *= u_max;
    out.phys = physics_loss(pred_veh_km, fd, grid);
  }
  out.mae = mean_abs_diff_clamped(tape.value(ids.output), sample.field, u_max);

  if (grads) {
    tape.backward(loss);
    add_param_grads(tape, ids, *grads);
  }
  return out;
}

double validation_mae(const Dataset& val, const FnoParams& params, const FnoConfig& mc,
                      const FundamentalDiagram& fd) {
  if (val.samples.empty()) return 0.0;
  std::vector<double> maes(val.samples.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(val.samples.size()); ++s) {
    Tensor pred = predict_normalized(val.samples[s].input, params, mc);
    maes[s] = mean_abs_diff_clamped(pred, val.samples[s].field, fd.u_max());
  }
  double total = 0.0;
  for (double m : maes) total += m;
  return total / static_cast<double>(maes.size());
}

}  // namespace

TrainResult train(const FnoConfig& model_config, FnoParams params, const Dataset& train_set,
                  const Dataset& val_set, const TrainConfig& config) {
  model_config.validate();
  if (config.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (config.lr_step_epochs < 1)
    throw std::invalid_argument("train: lr_step_epochs must be >= 1");

  TrainResult result;
  result.report.best_val_mae = std::numeric_limits<double>::infinity();
  if (config.epochs == 0) {
    result.params = std::move(params);
    result.report.best_val_mae = 0.0;
    return result;
  }
  if (train_set.samples.empty()) throw std::invalid_argument("train: empty training set");

  const FundamentalDiagram& fd = train_set.fd;
  const GridSpec& grid = train_set.grid;
  const double lambda = config.effective_lambda();
  const std::size_t n = train_set.samples.size();

  AdamState adam = make_adam_state(params);
  SplitMix64 shuffle_rng(config.seed ^ 0xC0FFEE5EEDull);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  // preallocated per-slot gradient buffers, reused every batch
  std::vector<FnoParams> grad_pool(std::min<std::size_t>(config.batch_size, n),
                                   zeros_like(params));
  std::vector<SampleStats> stats(grad_pool.size());
  FnoParams batch_grads = zeros_like(params);
  auto acc_views = param_views(batch_grads);

  FnoParams best = params;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.lr * std::pow(config.lr_decay, epoch / config.lr_step_epochs);

    // seeded Fisher-Yates
    for (std::size_t i = n - 1; i > 0; --i)
      std::swap(order[i], order[shuffle_rng.below(i + 1)]);

    double ep_data = 0.0, ep_phys = 0.0, ep_mae = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t bsz = std::min<std::size_t>(config.batch_size, n - start);
#pragma omp parallel for schedule(dynamic)
      for (std::int64_t b = 0; b < static_cast<std::int64_t>(bsz); ++b) {
        for (auto& view : param_views(grad_pool[b]))
          std::fill(view.data, view.data + view.size, 0.0);
        stats[b] = run_sample(train_set.samples[order[start + b]], params, model_config,
                              fd, grid, lambda, &grad_pool[b]);
      }

      // mean-of-batch objective; reduction in sample order for determinism
      for (auto& view : acc_views) std::fill(view.data, view.data + view.size, 0.0);
      for (std::size_t b = 0; b < bsz; ++b) {
        auto gviews = param_views(grad_pool[b]);
        for (std::size_t t = 0; t < acc_views.size(); ++t)
          for (std::size_t k = 0; k < acc_views[t].size; ++k)
            acc_views[t].data[k] += gviews[t].data[k];
        ep_data += stats[b].data;
        ep_phys += stats[b].phys;
        ep_mae += stats[b].mae;
      }
      const double inv_b = 1.0 / static_cast<double>(bsz);
      for (auto& view : acc_views)
        for (std::size_t k = 0; k < view.size; ++k) view.data[k] *= inv_b;

      adam_step(params, batch_grads, adam, lr);
    }

    EpochStats st;
    st.data_loss = ep_data / static_cast<double>(n);
    st.phys_loss = ep_phys / static_cast<double>(n);
    st.total_loss = st.data_loss + lambda * st.phys_loss;
    st.train_mae = ep_mae / static_cast<double>(n);
    st.val_mae = validation_mae(val_set, params, model_config, fd);
    st.lr = lr;
    if (!std::isfinite(st.total_loss) || !std::isfinite(st.val_mae))
      throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                               " (data=" + std::to_string(st.data_loss) +
                               ", phys=" + std::to_string(st.phys_loss) + "); aborting");
    result.report.epochs.push_back(st);

    const double score = val_set.samples.empty() ? st.train_mae : st.val_mae;
    if (score < result.report.best_val_mae) {
      result.report.best_val_mae = score;
      result.report.best_epoch = epoch;
      best = params;
    }
  }
  result.params = std::move(best);
  return result;
}

std::pair<Dataset, Dataset> split_validation(const Dataset& full, double frac,
                                             std::uint64_t seed) {
  if (frac < 0.0 || frac >= 1.0)
    throw std::invalid_argument("split_validation: frac must be in [0, 1)");
  Dataset train(full.grid, full.fd, full.spec);
  Dataset val(full.grid, full.fd, full.spec);

  // group samples by class pair, then peel off the tail of a seeded shuffle
  std::map<std::pair<int, int>, std::vector<std::size_t>> groups;
  for (std::size_t s = 0; s < full.samples.size(); ++s)
    groups[{full.samples[s].scenario.ic_class, full.samples[s].scenario.bc_class}].push_back(s);

  SplitMix64 rng(seed ^ 0x5EED5EEDull);
  for (auto& [key, idx] : groups) {
    for (std::size_t i = idx.size() - 1; i > 0; --i)
      std::swap(idx[i], idx[rng.below(i + 1)]);
    const std::size_t n_val =
        idx.empty() ? 0 : static_cast<std::size_t>(std::ceil(frac * idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
      (i < idx.size() - n_val ? train : val).samples.push_back(full.samples[idx[i]]);
  }
  return {std::move(train), std::move(val)};
}

SweepResult lambda_sweep(const FnoConfig& model_config, const FnoParams& init,
                         const Dataset& train_set, const Dataset& val_set,
                         const std::vector<double>& lambdas, const TrainConfig& base) {
  if (lambdas.empty()) throw std::invalid_argument("lambda_sweep: empty lambda list");
  SweepResult sweep;
  double best_mae = std::numeric_limits<double>::infinity();
  for (double lambda : lambdas) {
    TrainConfig cfg = base;
    cfg.lambda = lambda;
    cfg.mode = lambda > 0.0 ? TrainMode::pi_fno : TrainMode::fno;
    TrainResult run = train(model_config, init, train_set, val_set, cfg);
    SweepRow row;
    row.lambda = lambda;
    row.val_mae = run.report.best_val_mae;
    row.final_train_mae =
        run.report.epochs.empty() ? 0.0 : run.report.epochs.back().train_mae;
    if (row.val_mae < best_mae) {  // strict: ties keep the smaller lambda
      best_mae = row.val_mae;
      sweep.best_lambda = lambda;
    }
    sweep.rows.push_back(row);
    sweep.runs.push_back(std::move(run));
  }
  return sweep;
}

}  // namespace lwrfno
