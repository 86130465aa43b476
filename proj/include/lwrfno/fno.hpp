#pragma once

#include <cstdint>
#include <vector>

#include "lwrfno/density_field.hpp"
#include "lwrfno/grid.hpp"
#include "lwrfno/kernels.hpp"
#include "lwrfno/scenario.hpp"
#include "lwrfno/tape.hpp"
#include "lwrfno/tensor.hpp"

namespace lwrfno {

/// Architecture of the spectral operator network: a pointwise affine lift to
/// `width` channels, `n_layers` spectral layers
///
///   z  ->  act( W z + Re IFFT( R . FFT(z) ) )
///
/// with per-mode channel mixing R truncated to (modes_x, modes_t), and a
/// two-stage pointwise projection width -> proj_hidden -> 1. The parameter
/// count depends only on the channel/mode sizes, never on the grid.
struct FnoConfig {
  int n_layers = 4;
  int width = 16;
  int modes_x = 8;
  int modes_t = 16;
  int proj_hidden = 128;
  int in_channels = 4;
  Activation act = Activation::gelu;
  GridSpec grid;

  void validate() const;
};

struct FourierLayerParams {
  Tensor pointwise_weight;   // (width, width)
  Tensor pointwise_bias;     // (width)
  CTensor spectral_weight;   // (width, width, modes_x, modes_t)
};

struct FnoParams {
  Tensor lift_weight, lift_bias;    // (width, in_channels), (width)
  std::vector<FourierLayerParams> layers;
  Tensor proj1_weight, proj1_bias;  // (proj_hidden, width)
  Tensor proj2_weight, proj2_bias;  // (1, proj_hidden)
};

/// Seeded init: real weights uniform in +-1/sqrt(fan_in), zero biases,
/// spectral weights with re/im uniform in [0, 1/width^2).
FnoParams init_params(const FnoConfig& config, std::uint64_t seed);

FnoParams zeros_like(const FnoParams& p);

/// Total scalar parameter count (complex entries count twice); grid-free.
std::int64_t parameter_count(const FnoConfig& config);

/// Deterministic flat view over all parameter storage, complex tensors
/// reinterpreted as interleaved re/im doubles. Order: lift, layers in order
/// (pointwise weight, bias, spectral weight), projection stages.
struct ParamView {
  const char* name;
  double* data;
  std::size_t size;
};
std::vector<ParamView> param_views(FnoParams& p);

/// Network input encoding, shape (4, nx, nt), all channels O(1):
///   0: known density values / u_max (IC in column 0; forward: BC in the exit
///      row; inverse: observed values at mask cells), zero elsewhere
///   1: 0/1 mask of the known cells
///   2: normalized x coordinate, i/(nx-1)
///   3: normalized t coordinate, j/(nt-1)
/// Inverse scenarios read the observed densities out of `truth_field`
/// (nx, nt, veh/km) at the masked cells; forward scenarios ignore it.
Tensor encode_input(const Scenario& scenario, const GridSpec& grid,
                    const FundamentalDiagram& fd, const Tensor* truth_field = nullptr);

/// Tape node ids for one forward build; used to read parameter gradients.
struct TapeBindings {
  int input = -1;
  int lift_w = -1, lift_b = -1;
  struct LayerIds { int w, b, r; };
  std::vector<LayerIds> layers;
  int proj1_w = -1, proj1_b = -1, proj2_w = -1, proj2_b = -1;
  int output = -1;  // (1, nx, nt), normalized units
};

TapeBindings build_forward(Tape& tape, const Tensor& encoded, const FnoParams& params,
                           const FnoConfig& config);

/// Accumulate d(loss)/d(params) recorded on the tape into `accum` (+=).
void add_param_grads(const Tape& tape, const TapeBindings& ids, FnoParams& accum);

/// Forward pass without keeping gradients; output (1, nx, nt) in normalized
/// units (multiply by u_max for veh/km).
Tensor predict_normalized(const Tensor& encoded, const FnoParams& params,
                          const FnoConfig& config);

/// End-to-end convenience: encode, run the operator, un-normalize and clamp
/// into [0, u_max] for reporting. Inverse scenarios need the solved field
/// for their observed values, like encode_input.
DensityField predict(const Scenario& scenario, const FnoParams& params,
                     const FnoConfig& config, const FundamentalDiagram& fd,
                     const Tensor* truth_field = nullptr);

}  // namespace lwrfno
