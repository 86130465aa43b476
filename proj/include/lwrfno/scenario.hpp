#pragma once

#include <cstdint>
#include <vector>

#include "lwrfno/density_field.hpp"
#include "lwrfno/fundamental_diagram.hpp"
#include "lwrfno/grid.hpp"
#include "lwrfno/rng.hpp"
#include "lwrfno/tensor.hpp"

namespace lwrfno {

enum class ScenarioKind { forward, inverse };

/// One simulation input: a piecewise-constant initial density profile whose
/// complexity class counts its discontinuities, and an exit boundary series
/// whose class counts its red-light pulses. Inverse scenarios additionally
/// carry the observation mask produced by probe-vehicle trajectories.
struct Scenario {
  std::vector<double> ic;             // length nx, veh/km
  std::vector<double> bc;             // length nt, veh/km; bc[j] acts on step j -> j+1
  int ic_class = 0;                   // number of discontinuities in ic
  int bc_class = 0;                   // number of red pulses in bc
  ScenarioKind kind = ScenarioKind::forward;
  std::vector<std::uint8_t> obs_mask; // nx*nt row-major; empty for forward scenarios
  std::uint64_t seed = 0;             // substream seed this scenario was drawn from
};

/// Tunable ranges behind the scenario families. Defaults keep features
/// resolvable on coarse grids: segments span at least 3 cells, adjacent
/// levels differ by at least 5% of u_max, red phases last 30-120 s with
/// green gaps of at least 30 s.
struct GenParams {
  int min_segment_cells = 3;
  double level_separation_frac = 0.05;
  double min_red_s = 30.0;
  double max_red_s = 120.0;
  double min_gap_s = 30.0;
};

/// Piecewise-constant initial profile with exactly class_k discontinuities.
std::vector<double> gen_initial(int class_k, SplitMix64& rng, const GridSpec& grid,
                                const FundamentalDiagram& fd, const GenParams& p = {});

/// Exit-boundary series: free flow (0) with exactly class_m red pulses at u_max.
std::vector<double> gen_boundary(int class_m, SplitMix64& rng, const GridSpec& grid,
                                 const FundamentalDiagram& fd, const GenParams& p = {});

/// Union of cells visited by n_traj probe vehicles released at random points
/// of the t=0 edge and the upstream x=0 edge.
std::vector<std::uint8_t> gen_observations(const DensityField& field, int n_traj,
                                           SplitMix64& rng, const FundamentalDiagram& fd);

/// Draw the (ic, bc) part of a scenario from one substream. The observation
/// mask for inverse scenarios is filled in after simulation (it needs the
/// solved field) by continuing the same stream.
Scenario make_scenario(int ic_class, int bc_class, ScenarioKind kind,
                       std::uint64_t stream_seed, const GridSpec& grid,
                       const FundamentalDiagram& fd, const GenParams& p = {});

// --- scanning oracles used by tests and class bookkeeping ---

int count_discontinuities(const std::vector<double>& profile);
int count_pulses(const std::vector<double>& series, double high_level);

struct DatasetSpec {
  std::vector<int> ic_classes;
  std::vector<int> bc_classes;
  int samples_per_class_pair = 0;
  ScenarioKind kind = ScenarioKind::forward;
  std::uint64_t seed = 0;
  int n_trajectories = 10;
};

struct Sample {
  Scenario scenario;
  Tensor input;  // (4, nx, nt) encoded network input
  Tensor field;  // (nx, nt) solved density, veh/km
};

struct Dataset {
  GridSpec grid;
  FundamentalDiagram fd;
  DatasetSpec spec;
  std::vector<Sample> samples;

  Dataset(const GridSpec& g, const FundamentalDiagram& f, const DatasetSpec& s)
      : grid(g), fd(f), spec(s) {}
};

/// Simulate every (ic_class, bc_class, sample) triple the dataset spec asks
/// for and pair the encoded input with its solution. Deterministic given
/// spec.seed; samples are independent and generated in parallel.
Dataset build_dataset(const DatasetSpec& spec, const FundamentalDiagram& fd,
                      const GridSpec& grid,
                      SeedNamespace ns = SeedNamespace::train);

}  // namespace lwrfno
