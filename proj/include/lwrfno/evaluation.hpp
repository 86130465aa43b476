#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lwrfno/fno.hpp"
#include "lwrfno/scenario.hpp"

namespace lwrfno {

/// Mean absolute cellwise difference, veh/km.
double mae(const Tensor& pred, const Tensor& truth);

struct ClassRow {
  int class_index = 0;
  double mean_mae = 0.0;      // veh/km
  double std_mae = 0.0;
  double mean_mae_pct = 0.0;  // 100 * mean_mae / u_max
  int n = 0;
};

struct EvalReport {
  char axis = 'i';            // 'i': sweep ic classes, 'b': sweep bc classes
  std::string model_tag;      // fno | pi_fno
  std::string problem_tag;    // forward | inverse
  int knot = 0;               // last training class index
  std::vector<ClassRow> rows;
  double train_level = 0.0;   // fitted constant over classes <= knot
  double test_slope = 0.0;    // veh/km per class step over classes > knot
};

struct EvalSetup {
  char axis = 'i';
  std::vector<int> sweep_classes;   // e.g. 0..9 on the i axis
  std::vector<int> other_classes;   // classes sampled on the fixed axis
  int samples_per_class = 50;
  ScenarioKind kind = ScenarioKind::forward;
  int n_trajectories = 10;
  std::uint64_t seed = 0;           // drawn from the evaluation seed namespace
  int knot = 3;
  std::string model_tag = "fno";
};

/// Fresh held-out scenarios per class, solver ground truth, model prediction,
/// per-class MAE statistics and the fitted trendline.
EvalReport evaluate_classes(const FnoParams& params, const FnoConfig& config,
                            const FundamentalDiagram& fd, const GridSpec& grid,
                            const EvalSetup& setup);

/// Scenario for one (class, sample) cell of the evaluation matrix. The
/// families are nested per sample index: each class adds one feature (a
/// density discontinuity on the 'i' axis, a red pulse on the 'b' axis) to
/// the previous class's scenario while the fixed-axis series is shared. Row
/// means are therefore paired across classes, which makes the per-class
/// error increments measurable at small sample budgets.
Scenario eval_scenario(const EvalSetup& setup, int cls, int sample_index,
                       const FundamentalDiagram& fd, const GridSpec& grid);

/// Continuous two-segment least squares: constant `level` for classes <=
/// knot, `level + slope * (class - knot)` above. Needs >= 2 points per side.
struct Trendline {
  double level = 0.0;
  double slope = 0.0;
};
Trendline fit_trendline(std::span<const int> class_indices, std::span<const double> mae_means,
                        int knot);

struct ProfileRow {
  double t_s = 0.0;
  double x_m = 0.0;
  double u_true = 0.0;  // veh/km
  double u_pred = 0.0;  // veh/km, clamped
};

/// Spatial slices of truth and prediction at the requested times (snapped to
/// the nearest grid column); |times| * nx rows in time-major order.
std::vector<ProfileRow> export_profiles(const FnoParams& params, const FnoConfig& config,
                                        const Scenario& scenario,
                                        std::span<const double> times_s,
                                        const FundamentalDiagram& fd, const GridSpec& grid);

/// Spurious-oscillation measure of a predicted spatial profile against the
/// true one: |TV(pred) - TV(truth)| with TV the total variation.
double oscillation_index(std::span<const double> pred_profile,
                         std::span<const double> true_profile);

/// Spearman rank correlation (Pearson on ranks, average ranks on ties).
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace lwrfno
