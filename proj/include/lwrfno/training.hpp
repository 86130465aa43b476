#pragma once

#include <cstdint>
#include <vector>

#include "lwrfno/fno.hpp"
#include "lwrfno/scenario.hpp"

namespace lwrfno {

enum class TrainMode { fno, pi_fno };

struct TrainConfig {
  TrainMode mode = TrainMode::pi_fno;
  double lambda = 2.0;       // conservation-penalty coefficient; ignored for mode fno
  int epochs = 100;
  int batch_size = 16;
  double lr = 1e-3;
  int lr_step_epochs = 25;   // multiply lr by lr_decay every this many epochs
  double lr_decay = 0.5;
  std::uint64_t seed = 1;
  double val_fraction = 0.1;

  double effective_lambda() const { return mode == TrainMode::fno ? 0.0 : lambda; }
};

struct EpochStats {
  double data_loss = 0.0;   // mean per sample
  double phys_loss = 0.0;   // mean per sample
  double total_loss = 0.0;  // data + lambda * phys, mean per sample
  double train_mae = 0.0;   // veh/km, clamped predictions
  double val_mae = 0.0;     // veh/km
  double lr = 0.0;
};

struct LossReport {
  std::vector<EpochStats> epochs;
  int best_epoch = -1;
  double best_val_mae = 0.0;
};

// --- loss functions (plain, non-differentiating; the tape path reuses the
// --- same kernels so reported values match trained values exactly) ---

/// Sum over the batch of L2 norms of normalized-field differences.
/// Inputs are in normalized units (density / u_max), shape (nx, nt) each.
double data_loss(const std::vector<Tensor>& pred_norm, const std::vector<Tensor>& target_norm);

/// L2 norm of the discrete conservation residual of one field (veh/km).
double physics_loss(const Tensor& field_veh_km, const FundamentalDiagram& fd,
                    const GridSpec& grid);

/// data_loss + lambda * sum of per-sample physics losses. Fields in veh/km.
double total_loss(const std::vector<Tensor>& pred_veh_km,
                  const std::vector<Tensor>& target_veh_km, const TrainConfig& config,
                  const FundamentalDiagram& fd, const GridSpec& grid);

// --- optimizer ---

struct AdamState {
  FnoParams m, v;
  long step = 0;
};

AdamState make_adam_state(const FnoParams& params);

/// Standard Adam update, beta = (0.9, 0.999), eps = 1e-8. Complex spectral
/// weights are updated as independent re/im reals.
void adam_step(FnoParams& params, FnoParams& grads, AdamState& state, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

// --- training loop ---

struct TrainResult {
  FnoParams params;   // best-validation checkpoint
  LossReport report;
};

/// Mini-batch training with seeded shuffling, step-wise learning-rate decay
/// and best-validation checkpointing. Per-sample forward/backward fans out
/// across threads; gradients are reduced in sample order, so results are
/// deterministic for any thread count. Non-finite losses abort with a
/// diagnostic rather than training on.
TrainResult train(const FnoConfig& model_config, FnoParams params, const Dataset& train_set,
                  const Dataset& val_set, const TrainConfig& config);

/// Seeded class-stratified split: `frac` of each (ic,bc) class pair moves to
/// the validation set.
std::pair<Dataset, Dataset> split_validation(const Dataset& full, double frac,
                                             std::uint64_t seed);

struct SweepRow {
  double lambda = 0.0;
  double val_mae = 0.0;
  double final_train_mae = 0.0;
};

struct SweepResult {
  double best_lambda = 0.0;
  std::vector<SweepRow> rows;
  std::vector<TrainResult> runs;  // parallel to rows
};

/// Train one model per lambda and pick the validation-MAE argmin, ties
/// broken toward the smaller lambda.
SweepResult lambda_sweep(const FnoConfig& model_config, const FnoParams& init,
                         const Dataset& train_set, const Dataset& val_set,
                         const std::vector<double>& lambdas, const TrainConfig& base);

}  // namespace lwrfno
