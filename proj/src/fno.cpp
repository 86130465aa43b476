#include "lwrfno/fno.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lwrfno/rng.hpp"

namespace lwrfno {

void FnoConfig::validate() const {
  if (n_layers < 1 || width < 1 || proj_hidden < 1 || in_channels < 1)
    throw std::invalid_argument("FnoConfig: layer/width/channel counts must be >= 1");
  if (modes_x < 1 || modes_t < 1)
    throw std::invalid_argument("FnoConfig: mode counts must be >= 1");
  if (modes_x > grid.nx)
    throw std::invalid_argument("FnoConfig: modes_x exceeds nx");
  if (modes_t > grid.nt)
    throw std::invalid_argument("FnoConfig: modes_t exceeds nt");
}

FnoParams init_params(const FnoConfig& config, std::uint64_t seed) {
  config.validate();
  SplitMix64 rng(seed);
  const int w = config.width;

  auto uniform_pm = [&](std::vector<std::int64_t> shape, double bound) {
    Tensor t(std::move(shape));
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = rng.uniform(-bound, bound);
    return t;
  };

  FnoParams p;
  p.lift_weight = uniform_pm({w, config.in_channels}, 1.0 / std::sqrt(config.in_channels));
  p.lift_bias = Tensor({w});
  p.layers.resize(config.n_layers);
  const double spectral_scale = 1.0 / (static_cast<double>(w) * w);
  for (auto& layer : p.layers) {
    layer.pointwise_weight = uniform_pm({w, w}, 1.0 / std::sqrt(w));
    layer.pointwise_bias = Tensor({w});
    layer.spectral_weight = CTensor({w, w, config.modes_x, config.modes_t});
    for (std::size_t k = 0; k < layer.spectral_weight.size(); ++k)
      layer.spectral_weight[k] =
          cplx{rng.uniform() * spectral_scale, rng.uniform() * spectral_scale};
  }
  p.proj1_weight = uniform_pm({config.proj_hidden, w}, 1.0 / std::sqrt(w));
  p.proj1_bias = Tensor({config.proj_hidden});
  p.proj2_weight = uniform_pm({1, config.proj_hidden}, 1.0 / std::sqrt(config.proj_hidden));
  p.proj2_bias = Tensor({1});
  return p;
}

FnoParams zeros_like(const FnoParams& p) {
  FnoParams z;
  z.lift_weight = Tensor(p.lift_weight.shape());
  z.lift_bias = Tensor(p.lift_bias.shape());
  z.layers.resize(p.layers.size());
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    z.layers[l].pointwise_weight = Tensor(p.layers[l].pointwise_weight.shape());
    z.layers[l].pointwise_bias = Tensor(p.layers[l].pointwise_bias.shape());
    z.layers[l].spectral_weight = CTensor(p.layers[l].spectral_weight.shape());
  }
  z.proj1_weight = Tensor(p.proj1_weight.shape());
  z.proj1_bias = Tensor(p.proj1_bias.shape());
  z.proj2_weight = Tensor(p.proj2_weight.shape());
  z.proj2_bias = Tensor(p.proj2_bias.shape());
  return z;
}

std::int64_t parameter_count(const FnoConfig& config) {
  const std::int64_t w = config.width;
  const std::int64_t lift = w * config.in_channels + w;
  const std::int64_t per_layer = w * w + w + 2 * w * w * config.modes_x * config.modes_t;
  const std::int64_t proj = config.proj_hidden * w + config.proj_hidden + config.proj_hidden + 1;
  return lift + config.n_layers * per_layer + proj;
}

std::vector<ParamView> param_views(FnoParams& p) {
  std::vector<ParamView> views;
  auto real = [&](const char* name, Tensor& t) { views.push_back({name, t.data(), t.size()}); };
  auto cmplx = [&](const char* name, CTensor& t) {
    views.push_back({name, reinterpret_cast<double*>(t.data()), 2 * t.size()});
  };
  real("lift_weight", p.lift_weight);
  real("lift_bias", p.lift_bias);
  for (auto& layer : p.layers) {
    real("pointwise_weight", layer.pointwise_weight);
    real("pointwise_bias", layer.pointwise_bias);
    cmplx("spectral_weight", layer.spectral_weight);
  }
  real("proj1_weight", p.proj1_weight);
  real("proj1_bias", p.proj1_bias);
  real("proj2_weight", p.proj2_weight);
  real("proj2_bias", p.proj2_bias);
  return views;
}

Tensor encode_input(const Scenario& scenario, const GridSpec& grid,
                    const FundamentalDiagram& fd, const Tensor* truth_field) {
  const std::int64_t nx = grid.nx, nt = grid.nt;
  if (static_cast<std::int64_t>(scenario.ic.size()) != nx)
    throw std::invalid_argument("encode_input: ic length != nx");
  if (static_cast<std::int64_t>(scenario.bc.size()) != nt)
    throw std::invalid_argument("encode_input: bc length != nt");

  Tensor a({4, nx, nt});
  const double inv_umax = 1.0 / fd.u_max();

  // channel 0/1: known values and their mask
  for (std::int64_t i = 0; i < nx; ++i) {
    a.at3(0, i, 0) = scenario.ic[i] * inv_umax;
    a.at3(1, i, 0) = 1.0;
  }
  if (scenario.kind == ScenarioKind::forward) {
    for (std::int64_t j = 0; j < nt; ++j) {
      a.at3(0, nx - 1, j) = scenario.bc[j] * inv_umax;
      a.at3(1, nx - 1, j) = 1.0;
    }
  } else {
    if (!truth_field || static_cast<std::int64_t>(truth_field->size()) != nx * nt)
      throw std::invalid_argument("encode_input: inverse scenario needs the solved field");
    if (scenario.obs_mask.size() != static_cast<std::size_t>(nx) * nt)
      throw std::invalid_argument("encode_input: inverse scenario needs a full obs_mask");
    for (std::int64_t i = 0; i < nx; ++i)
      for (std::int64_t j = 0; j < nt; ++j)
        if (scenario.obs_mask[i * nt + j]) {
          a.at3(0, i, j) = (*truth_field)[i * nt + j] * inv_umax;
          a.at3(1, i, j) = 1.0;
        }
  }

  // channel 2/3: normalized coordinates
  for (std::int64_t i = 0; i < nx; ++i) {
    const double xi = nx > 1 ? static_cast<double>(i) / (nx - 1) : 0.0;
    for (std::int64_t j = 0; j < nt; ++j) {
      a.at3(2, i, j) = xi;
      a.at3(3, i, j) = nt > 1 ? static_cast<double>(j) / (nt - 1) : 0.0;
    }
  }
  return a;
}

TapeBindings build_forward(Tape& tape, const Tensor& encoded, const FnoParams& params,
                           const FnoConfig& config) {
  config.validate();
  if (encoded.shape() !=
      std::vector<std::int64_t>{config.in_channels, config.grid.nx, config.grid.nt})
    throw std::invalid_argument("build_forward: encoded input shape mismatch");

  TapeBindings ids;
  ids.input = tape.leaf(encoded);
  ids.lift_w = tape.leaf_ref(params.lift_weight);
  ids.lift_b = tape.leaf_ref(params.lift_bias);
  int z = tape.pointwise_linear(ids.input, ids.lift_w, ids.lift_b);

  for (const auto& layer : params.layers) {
    TapeBindings::LayerIds lid{};
    lid.w = tape.leaf_ref(layer.pointwise_weight);
    lid.b = tape.leaf_ref(layer.pointwise_bias);
    lid.r = tape.cleaf_ref(layer.spectral_weight);
    const int affine = tape.pointwise_linear(z, lid.w, lid.b);
    const int spectral = tape.spectral_conv(z, lid.r);
    z = tape.activation(tape.add(affine, spectral), config.act);
    ids.layers.push_back(lid);
  }

  ids.proj1_w = tape.leaf_ref(params.proj1_weight);
  ids.proj1_b = tape.leaf_ref(params.proj1_bias);
  ids.proj2_w = tape.leaf_ref(params.proj2_weight);
  ids.proj2_b = tape.leaf_ref(params.proj2_bias);
  const int hidden = tape.activation(tape.pointwise_linear(z, ids.proj1_w, ids.proj1_b), config.act);
  ids.output = tape.pointwise_linear(hidden, ids.proj2_w, ids.proj2_b);
  return ids;
}

void add_param_grads(const Tape& tape, const TapeBindings& ids, FnoParams& accum) {
  auto add_real = [&](int id, Tensor& dst) {
    const Tensor& g = tape.grad(id);
    if (g.empty()) return;
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += g[k];
  };
  auto add_cplx = [&](int id, CTensor& dst) {
    const CTensor& g = tape.cgrad(id);
    if (g.empty()) return;
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += g[k];
  };
  add_real(ids.lift_w, accum.lift_weight);
  add_real(ids.lift_b, accum.lift_bias);
  for (std::size_t l = 0; l < ids.layers.size(); ++l) {
    add_real(ids.layers[l].w, accum.layers[l].pointwise_weight);
    add_real(ids.layers[l].b, accum.layers[l].pointwise_bias);
    add_cplx(ids.layers[l].r, accum.layers[l].spectral_weight);
  }
  add_real(ids.proj1_w, accum.proj1_weight);
  add_real(ids.proj1_b, accum.proj1_bias);
  add_real(ids.proj2_w, accum.proj2_weight);
  add_real(ids.proj2_b, accum.proj2_bias);
}

Tensor predict_normalized(const Tensor& encoded, const FnoParams& params,
                          const FnoConfig& config) {
  // same kernels and call order as the tape build, minus gradient bookkeeping
  config.validate();
  if (encoded.shape() !=
      std::vector<std::int64_t>{config.in_channels, config.grid.nx, config.grid.nt})
    throw std::invalid_argument("predict_normalized: encoded input shape mismatch");

  Tensor z = pointwise_linear(encoded, params.lift_weight, params.lift_bias);
  for (const auto& layer : params.layers) {
    Tensor affine = pointwise_linear(z, layer.pointwise_weight, layer.pointwise_bias);
    Tensor spectral = spectral_conv(z, layer.spectral_weight);
    for (std::size_t k = 0; k < affine.size(); ++k) affine[k] += spectral[k];
    z = activation_forward(affine, config.act);
  }
  Tensor hidden = activation_forward(
      pointwise_linear(z, params.proj1_weight, params.proj1_bias), config.act);
  return pointwise_linear(hidden, params.proj2_weight, params.proj2_bias);
}

DensityField predict(const Scenario& scenario, const FnoParams& params,
                     const FnoConfig& config, const FundamentalDiagram& fd,
                     const Tensor* truth_field) {
  Tensor encoded = encode_input(scenario, config.grid, fd, truth_field);
  Tensor out = predict_normalized(encoded, params, config);

  DensityField field(config.grid);
  for (std::size_t k = 0; k < field.values.size(); ++k)
    field.values[k] = std::clamp(out[k] * fd.u_max(), 0.0, fd.u_max());
  return field;
}

}  // namespace lwrfno
