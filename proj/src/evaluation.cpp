#include "lwrfno/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lwrfno/godunov.hpp"
#include "lwrfno/rng.hpp"

namespace lwrfno {

double mae(const Tensor& pred, const Tensor& truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("mae: size mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) s += std::abs(pred[k] - truth[k]);
  return s / static_cast<double>(pred.size());
}

namespace {

std::vector<std::int64_t> sorted_cut_split(std::int64_t slack, int parts, SplitMix64& rng) {
  std::vector<std::int64_t> cuts(parts - 1);
  for (auto& c : cuts) c = rng.uniform_int(0, slack);
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::int64_t> out(parts);
  std::int64_t prev = 0;
  for (int k = 0; k + 1 < parts; ++k) {
    out[k] = cuts[k] - prev;
    prev = cuts[k];
  }
  out[parts - 1] = slack - prev;
  return out;
}

void shuffle_tail(std::vector<int>& v, SplitMix64& rng) {
  for (std::size_t k = v.size() - 1; k > 0; --k)
    std::swap(v[k], v[rng.below(k + 1)]);
}

// Nested initial profiles: the final partition (max_class+1 segments with
// pairwise-separated levels) is drawn once, and its boundaries activate in a
// random order; the class-k member keeps the first k boundaries, inactive
// stretches inheriting the level of their leftmost segment.
std::vector<double> nested_initial(int cls, int max_class, SplitMix64& rng,
                                   const GridSpec& grid, const FundamentalDiagram& fd) {
  const int nseg = max_class + 1;
  const int min_len = 3;
  if (nseg * min_len > grid.nx)
    throw std::invalid_argument("eval_scenario: nx too small for the class family");
  const double sep = 0.05 * fd.u_max();

  std::vector<std::int64_t> extra = nseg > 1 ? sorted_cut_split(grid.nx - nseg * min_len, nseg, rng)
                                             : std::vector<std::int64_t>{grid.nx - min_len};
  std::vector<int> start(nseg + 1, 0);
  for (int s = 0; s < nseg; ++s)
    start[s + 1] = start[s] + min_len + static_cast<int>(extra[s]);

  // levels with pairwise separation >= sep: sorted spread set, then permuted
  std::vector<double> levels(nseg);
  {
    const double span = fd.u_max() - sep * (nseg - 1);
    std::vector<double> z(nseg);
    for (auto& v : z) v = rng.uniform(0.0, span);
    std::sort(z.begin(), z.end());
    for (int k = 0; k < nseg; ++k) levels[k] = sep * k + z[k];
    for (int k = nseg - 1; k > 0; --k) std::swap(levels[k], levels[rng.below(k + 1)]);
  }

  std::vector<int> order(max_class);
  for (int k = 0; k < max_class; ++k) order[k] = k + 1;  // boundary before segment k+1
  if (!order.empty()) shuffle_tail(order, rng);

  std::vector<bool> active(nseg, false);
  for (int k = 0; k < cls; ++k) active[order[k]] = true;

  std::vector<double> ic(grid.nx);
  double level = levels[0];
  for (int s = 0; s < nseg; ++s) {
    if (active[s]) level = levels[s];
    for (int i = start[s]; i < start[s + 1]; ++i) ic[i] = level;
  }
  return ic;
}

// Nested boundary series: the full red-pulse schedule for max_class lights
// is laid out once; the class-m member turns on the first m pulses of a
// random activation order.
std::vector<double> nested_boundary(int cls, int max_class, SplitMix64& rng,
                                    const GridSpec& grid, const FundamentalDiagram& fd) {
  std::vector<double> bc(grid.nt, 0.0);
  if (max_class == 0) return bc;
  const auto dmin = static_cast<std::int64_t>(std::ceil(30.0 / grid.dt_s));
  const auto dmax = static_cast<std::int64_t>(std::floor(120.0 / grid.dt_s));
  const auto gmin = static_cast<std::int64_t>(std::ceil(30.0 / grid.dt_s));
  if (max_class * dmin + (max_class - 1) * gmin > grid.nt)
    throw std::invalid_argument("eval_scenario: horizon too short for the class family");

  std::vector<std::int64_t> dur(max_class);
  std::int64_t total = 0;
  for (int attempt = 0; attempt < 100; ++attempt) {
    total = 0;
    for (auto& d : dur) total += d = rng.uniform_int(dmin, dmax);
    if (total + (max_class - 1) * gmin <= grid.nt) break;
    if (attempt == 99) {
      for (auto& d : dur) d = dmin;
      total = max_class * dmin;
    }
  }
  std::vector<std::int64_t> extra =
      sorted_cut_split(grid.nt - total - (max_class - 1) * gmin, max_class + 1, rng);

  std::vector<int> order(max_class);
  for (int k = 0; k < max_class; ++k) order[k] = k;
  shuffle_tail(order, rng);
  std::vector<bool> active(max_class, false);
  for (int k = 0; k < cls; ++k) active[order[k]] = true;

  std::int64_t cursor = extra[0];
  for (int k = 0; k < max_class; ++k) {
    if (active[k])
      for (std::int64_t j = 0; j < dur[k]; ++j) bc[cursor + j] = fd.u_max();
    cursor += dur[k] + gmin + extra[k + 1];
  }
  return bc;
}

}  // namespace

Scenario eval_scenario(const EvalSetup& setup, int cls, int sample_index,
                       const FundamentalDiagram& fd, const GridSpec& grid) {
  // draw streams depend on the sample index only, never on the swept class
  const std::uint64_t seed =
      scenario_stream_seed(setup.seed, SeedNamespace::evaluation, sample_index);
  SplitMix64 rng_other(seed ^ 0xA1);
  SplitMix64 rng_ic(seed ^ 0xA2);
  SplitMix64 rng_bc(seed ^ 0xA3);

  const int max_cls = *std::max_element(setup.sweep_classes.begin(), setup.sweep_classes.end());
  const int other = setup.other_classes[rng_other.below(setup.other_classes.size())];

  Scenario sc;
  if (setup.axis == 'i') {
    sc.ic = nested_initial(cls, max_cls, rng_ic, grid, fd);
    sc.bc = gen_boundary(other, rng_bc, grid, fd);
    sc.ic_class = cls;
    sc.bc_class = other;
  } else {
    sc.ic = gen_initial(other, rng_ic, grid, fd);
    sc.bc = nested_boundary(cls, max_cls, rng_bc, grid, fd);
    sc.ic_class = other;
    sc.bc_class = cls;
  }
  sc.kind = setup.kind;
  sc.seed = seed;
  return sc;
}

EvalReport evaluate_classes(const FnoParams& params, const FnoConfig& config,
                            const FundamentalDiagram& fd, const GridSpec& grid,
                            const EvalSetup& setup) {
  if (setup.samples_per_class < 1)
    throw std::invalid_argument("evaluate_classes: samples_per_class must be >= 1");
  if (setup.sweep_classes.empty() || setup.other_classes.empty())
    throw std::invalid_argument("evaluate_classes: class lists must be non-empty");

  EvalReport report;
  report.axis = setup.axis;
  report.model_tag = setup.model_tag;
  report.problem_tag = setup.kind == ScenarioKind::forward ? "forward" : "inverse";
  report.knot = setup.knot;

  const double u_max = fd.u_max();
  for (std::size_t ci = 0; ci < setup.sweep_classes.size(); ++ci) {
    const int cls = setup.sweep_classes[ci];
    std::vector<double> sample_mae(setup.samples_per_class);

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(setup.samples_per_class); ++s) {
      Scenario sc = eval_scenario(setup, cls, static_cast<int>(s), fd, grid);
      DensityField truth = simulate(sc, fd, grid);
      Tensor truth_t({grid.nx, grid.nt}, truth.values);
      if (setup.kind == ScenarioKind::inverse) {
        SplitMix64 rng_obs(sc.seed ^ 0xA4);
        sc.obs_mask = gen_observations(truth, setup.n_trajectories, rng_obs, fd);
      }

      Tensor encoded = encode_input(sc, grid, fd, &truth_t);
      Tensor pred_norm = predict_normalized(encoded, params, config);
      Tensor pred(truth_t.shape());
      for (std::size_t k = 0; k < pred.size(); ++k)
        pred[k] = std::clamp(pred_norm[k] * u_max, 0.0, u_max);
      sample_mae[s] = mae(pred, truth_t);
    }

    ClassRow row;
    row.class_index = cls;
    row.n = setup.samples_per_class;
    double mean = 0.0;
    for (double m : sample_mae) mean += m;
    mean /= static_cast<double>(sample_mae.size());
    double var = 0.0;
    for (double m : sample_mae) var += (m - mean) * (m - mean);
    row.mean_mae = mean;
    row.std_mae = sample_mae.size() > 1
                      ? std::sqrt(var / static_cast<double>(sample_mae.size() - 1))
                      : 0.0;
    row.mean_mae_pct = 100.0 * mean / u_max;
    report.rows.push_back(row);
  }

  // fitted trendline when both sides of the knot are populated
  std::vector<int> classes;
  std::vector<double> means;
  for (const auto& r : report.rows) {
    classes.push_back(r.class_index);
    means.push_back(r.mean_mae);
  }
  int below = 0, above = 0;
  for (int c : classes) (c <= setup.knot ? below : above)++;
  if (below >= 2 && above >= 2) {
    Trendline t = fit_trendline(classes, means, setup.knot);
    report.train_level = t.level;
    report.test_slope = t.slope;
  }
  return report;
}

Trendline fit_trendline(std::span<const int> class_indices, std::span<const double> mae_means,
                        int knot) {
  if (class_indices.size() != mae_means.size())
    throw std::invalid_argument("fit_trendline: length mismatch");
  int below = 0, above = 0;
  for (int c : class_indices) (c <= knot ? below : above)++;
  if (below < 2 || above < 2)
    throw std::invalid_argument("fit_trendline: need >= 2 points on each side of the knot");

  // least squares over (level, slope) for the continuous two-segment model
  //   y = level                          for class <= knot
  //   y = level + slope * (class - knot) for class >  knot
  double n = static_cast<double>(class_indices.size());
  double sum_d = 0.0, sum_d2 = 0.0, sum_y = 0.0, sum_dy = 0.0;
  for (std::size_t k = 0; k < class_indices.size(); ++k) {
    const double d = class_indices[k] > knot ? class_indices[k] - knot : 0.0;
    sum_d += d;
    sum_d2 += d * d;
    sum_y += mae_means[k];
    sum_dy += d * mae_means[k];
  }
  // normal equations: [n, sum_d; sum_d, sum_d2] [level; slope] = [sum_y; sum_dy]
  const double det = n * sum_d2 - sum_d * sum_d;
  if (std::abs(det) < 1e-30) throw std::invalid_argument("fit_trendline: singular system");
  Trendline t;
  t.level = (sum_y * sum_d2 - sum_d * sum_dy) / det;
  t.slope = (n * sum_dy - sum_d * sum_y) / det;
  return t;
}

std::vector<ProfileRow> export_profiles(const FnoParams& params, const FnoConfig& config,
                                        const Scenario& scenario,
                                        std::span<const double> times_s,
                                        const FundamentalDiagram& fd, const GridSpec& grid) {
  DensityField truth = simulate(scenario, fd, grid);
  Tensor truth_t({grid.nx, grid.nt}, truth.values);
  DensityField pred = predict(scenario, params, config, fd, &truth_t);

  std::vector<ProfileRow> rows;
  rows.reserve(times_s.size() * grid.nx);
  for (double t : times_s) {
    const int j = std::clamp(static_cast<int>(t / grid.dt_s + 0.5), 0, grid.nt - 1);
    for (int i = 0; i < grid.nx; ++i)
      rows.push_back({j * grid.dt_s, (i + 0.5) * grid.dx_m, truth.at(i, j), pred.at(i, j)});
  }
  return rows;
}

namespace {

double total_variation(std::span<const double> v) {
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) tv += std::abs(v[i + 1] - v[i]);
  return tv;
}

std::vector<double> ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  std::size_t k = 0;
  while (k < n) {
    std::size_t k2 = k;
    while (k2 + 1 < n && v[idx[k2 + 1]] == v[idx[k]]) ++k2;
    const double avg = 0.5 * (k + k2) + 1.0;  // average rank for ties
    for (std::size_t t = k; t <= k2; ++t) r[idx[t]] = avg;
    k = k2 + 1;
  }
  return r;
}

}  // namespace

double oscillation_index(std::span<const double> pred_profile,
                         std::span<const double> true_profile) {
  if (pred_profile.size() != true_profile.size())
    throw std::invalid_argument("oscillation_index: length mismatch");
  return std::abs(total_variation(pred_profile) - total_variation(true_profile));
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("spearman: need two equal-length series");
  std::vector<double> ra = ranks(a), rb = ranks(b);
  double ma = 0.0, mb = 0.0;
  for (std::size_t k = 0; k < ra.size(); ++k) {
    ma += ra[k];
    mb += rb[k];
  }
  ma /= static_cast<double>(ra.size());
  mb /= static_cast<double>(rb.size());
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t k = 0; k < ra.size(); ++k) {
    cov += (ra[k] - ma) * (rb[k] - mb);
    va += (ra[k] - ma) * (ra[k] - ma);
    vb += (rb[k] - mb) * (rb[k] - mb);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

}  // namespace lwrfno
