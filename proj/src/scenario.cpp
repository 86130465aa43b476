#include "lwrfno/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lwrfno/fno.hpp"
#include "lwrfno/godunov.hpp"

namespace lwrfno {

namespace {

// Split `slack` into `parts` non-negative integers: sort parts-1 uniform cut
// points, take differences.
std::vector<std::int64_t> split_slack(std::int64_t slack, int parts, SplitMix64& rng) {
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

}  // namespace

std::vector<double> gen_initial(int class_k, SplitMix64& rng, const GridSpec& grid,
                                const FundamentalDiagram& fd, const GenParams& p) {
  if (class_k < 0 || class_k > 9)
    throw std::invalid_argument("gen_initial: class must be in [0, 9]");
  const int segments = class_k + 1;
  const int min_len = p.min_segment_cells;
  if (segments * min_len > grid.nx)
    throw std::invalid_argument("gen_initial: nx too small for " + std::to_string(segments) +
                                " segments of " + std::to_string(min_len) + " cells");

  // segment lengths: minimum length plus a uniformly split remainder
  std::vector<std::int64_t> extra =
      split_slack(grid.nx - static_cast<std::int64_t>(segments) * min_len, segments, rng);

  // levels: uniform in [0, u_max], adjacent levels at least 5% of u_max apart
  const double sep = p.level_separation_frac * fd.u_max();
  std::vector<double> levels(segments);
  levels[0] = rng.uniform(0.0, fd.u_max());
  for (int s = 1; s < segments; ++s) {
    double v = rng.uniform(0.0, fd.u_max());
    while (std::abs(v - levels[s - 1]) < sep) v = rng.uniform(0.0, fd.u_max());
    levels[s] = v;
  }

  std::vector<double> ic(grid.nx);
  int i = 0;
  for (int s = 0; s < segments; ++s)
    for (std::int64_t k = 0; k < min_len + extra[s]; ++k) ic[i++] = levels[s];
  return ic;
}

std::vector<double> gen_boundary(int class_m, SplitMix64& rng, const GridSpec& grid,
                                 const FundamentalDiagram& fd, const GenParams& p) {
  if (class_m < 0 || class_m > 8)
    throw std::invalid_argument("gen_boundary: class must be in [0, 8]");
  std::vector<double> bc(grid.nt, 0.0);
  if (class_m == 0) return bc;

  // pulse durations and gaps live on the step grid so pulses never merge
  const auto dmin = static_cast<std::int64_t>(std::ceil(p.min_red_s / grid.dt_s));
  const auto dmax = static_cast<std::int64_t>(std::floor(p.max_red_s / grid.dt_s));
  const auto gmin = static_cast<std::int64_t>(std::ceil(p.min_gap_s / grid.dt_s));
  const std::int64_t horizon = grid.nt;
  if (class_m * dmin + (class_m - 1) * gmin > horizon)
    throw std::invalid_argument("gen_boundary: horizon too short for " +
                                std::to_string(class_m) + " red pulses");

  std::vector<std::int64_t> dur(class_m);
  std::int64_t total = 0;
  for (int attempt = 0; attempt < 100; ++attempt) {
    total = 0;
    for (auto& d : dur) total += d = rng.uniform_int(dmin, dmax);
    if (total + (class_m - 1) * gmin <= horizon) break;
    if (attempt == 99)
      for (auto& d : dur) d = dmin, total = class_m * dmin;
  }

  std::vector<std::int64_t> extra =
      split_slack(horizon - total - (class_m - 1) * gmin, class_m + 1, rng);
  std::int64_t cursor = extra[0];
  for (int k = 0; k < class_m; ++k) {
    for (std::int64_t j = 0; j < dur[k]; ++j) bc[cursor + j] = fd.u_max();
    cursor += dur[k] + gmin + extra[k + 1];
  }
  return bc;
}

std::vector<std::uint8_t> gen_observations(const DensityField& field, int n_traj,
                                           SplitMix64& rng, const FundamentalDiagram& fd) {
  if (n_traj < 1) throw std::invalid_argument("gen_observations: n_traj must be >= 1");
  const GridSpec& g = field.grid;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(g.nx) * g.nt, 0);
  for (int k = 0; k < n_traj; ++k) {
    double x0 = 0.0, t0 = 0.0;
    if (rng.uniform() < 0.5)
      x0 = rng.uniform(0.0, g.x_len_m());  // enter on the t = 0 edge
    else
      t0 = rng.uniform(0.0, g.t_len_s());  // enter upstream at x = 0
    for (const CellIndex& c : vehicle_trajectory(field, x0, t0, fd))
      mask[static_cast<std::size_t>(c.i) * g.nt + c.j] = 1;
  }
  return mask;
}

Scenario make_scenario(int ic_class, int bc_class, ScenarioKind kind,
                       std::uint64_t stream_seed, const GridSpec& grid,
                       const FundamentalDiagram& fd, const GenParams& p) {
  SplitMix64 rng(stream_seed);
  Scenario s;
  s.ic = gen_initial(ic_class, rng, grid, fd, p);
  s.bc = gen_boundary(bc_class, rng, grid, fd, p);
  s.ic_class = ic_class;
  s.bc_class = bc_class;
  s.kind = kind;
  s.seed = stream_seed;
  return s;
}

int count_discontinuities(const std::vector<double>& profile) {
  int n = 0;
  for (std::size_t i = 0; i + 1 < profile.size(); ++i)
    if (profile[i] != profile[i + 1]) ++n;
  return n;
}

int count_pulses(const std::vector<double>& series, double high_level) {
  int n = 0;
  for (std::size_t j = 0; j < series.size(); ++j) {
    bool high = series[j] == high_level;
    bool prev_high = j > 0 && series[j - 1] == high_level;
    if (high && !prev_high) ++n;
  }
  return n;
}

Dataset build_dataset(const DatasetSpec& spec, const FundamentalDiagram& fd,
                      const GridSpec& grid, SeedNamespace ns) {
  if (spec.ic_classes.empty() || spec.bc_classes.empty())
    throw std::invalid_argument("build_dataset: class sets must be non-empty");
  if (spec.samples_per_class_pair < 1)
    throw std::invalid_argument("build_dataset: samples_per_class_pair must be >= 1");

  const std::size_t total = spec.ic_classes.size() * spec.bc_classes.size() *
                            static_cast<std::size_t>(spec.samples_per_class_pair);
  Dataset ds(grid, fd, spec);
  ds.samples.resize(total);

  // samples are fully independent: substream per global index
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(total); ++idx) {
    const std::size_t per_pair = spec.samples_per_class_pair;
    const std::size_t pair = idx / per_pair;
    const int ic_class = spec.ic_classes[pair / spec.bc_classes.size()];
    const int bc_class = spec.bc_classes[pair % spec.bc_classes.size()];
    const std::uint64_t seed = scenario_stream_seed(spec.seed, ns, idx);

    SplitMix64 rng(seed);
    Scenario sc;
    sc.ic = gen_initial(ic_class, rng, grid, fd);
    sc.bc = gen_boundary(bc_class, rng, grid, fd);
    sc.ic_class = ic_class;
    sc.bc_class = bc_class;
    sc.kind = spec.kind;
    sc.seed = seed;

    DensityField field = simulate(sc, fd, grid);
    if (spec.kind == ScenarioKind::inverse)
      sc.obs_mask = gen_observations(field, spec.n_trajectories, rng, fd);

    Sample& out = ds.samples[idx];
    out.field = Tensor({grid.nx, grid.nt}, std::move(field.values));
    out.input = encode_input(sc, grid, fd, &out.field);
    out.scenario = std::move(sc);
  }
  return ds;
}

}  // namespace lwrfno
