#include "lwrfno/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lwrfno/kernels.hpp"

namespace lwrfno::ref {

std::vector<cplx> dft_1d(const std::vector<cplx>& x, bool inverse) {
  const std::size_t n = x.size();
  std::vector<cplx> y(n, cplx{0.0, 0.0});
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(j * k % n) /
                         static_cast<double>(n);
      y[k] += x[j] * cplx{std::cos(ang), std::sin(ang)};
    }
  return y;
}

CTensor dft2(const CTensor& x, bool inverse) {
  const auto& shape = x.shape();
  const std::int64_t nx = shape[shape.size() - 2];
  const std::int64_t nt = shape[shape.size() - 1];
  std::int64_t batch = 1;
  for (std::size_t d = 0; d + 2 < shape.size(); ++d) batch *= shape[d];

  CTensor y(shape);
  for (std::int64_t b = 0; b < batch; ++b) {
    // rows
    for (std::int64_t i = 0; i < nx; ++i) {
      std::vector<cplx> row(nt);
      for (std::int64_t j = 0; j < nt; ++j) row[j] = x[(b * nx + i) * nt + j];
      std::vector<cplx> out = dft_1d(row, inverse);
      for (std::int64_t j = 0; j < nt; ++j) y[(b * nx + i) * nt + j] = out[j];
    }
    // columns
    for (std::int64_t j = 0; j < nt; ++j) {
      std::vector<cplx> col(nx);
      for (std::int64_t i = 0; i < nx; ++i) col[i] = y[(b * nx + i) * nt + j];
      std::vector<cplx> out = dft_1d(col, inverse);
      for (std::int64_t i = 0; i < nx; ++i) y[(b * nx + i) * nt + j] = out[i];
    }
  }
  if (inverse) {
    const double norm = 1.0 / static_cast<double>(nx * nt);
    for (std::size_t k = 0; k < y.size(); ++k) y[k] *= norm;
  }
  return y;
}

Tensor pointwise_linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  const std::int64_t ci = x.shape()[0], nx = x.shape()[1], nt = x.shape()[2];
  const std::int64_t co = w.shape()[0];
  Tensor y({co, nx, nt});
  for (std::int64_t o = 0; o < co; ++o)
    for (std::int64_t i = 0; i < nx; ++i)
      for (std::int64_t j = 0; j < nt; ++j) {
        double acc = b[static_cast<std::size_t>(o)];
        for (std::int64_t c = 0; c < ci; ++c)
          acc += w[static_cast<std::size_t>(o * ci + c)] * x.at3(c, i, j);
        y.at3(o, i, j) = acc;
      }
  return y;
}

CTensor spectral_multiply(const CTensor& x, const CTensor& r) {
  const std::int64_t ci = x.shape()[0], nx = x.shape()[1], nt = x.shape()[2];
  const std::int64_t co = r.shape()[0], mx = r.shape()[2], mt = r.shape()[3];
  CTensor y({co, nx, nt});
  for (std::int64_t o = 0; o < co; ++o)
    for (std::int64_t a = 0; a < mx; ++a)
      for (std::int64_t b = 0; b < mt; ++b) {
        const std::int64_t kx = mode_bin(a, mx, nx);
        cplx acc{0.0, 0.0};
        for (std::int64_t i = 0; i < ci; ++i)
          acc += r[static_cast<std::size_t>(((o * ci + i) * mx + a) * mt + b)] *
                 x[static_cast<std::size_t>((i * nx + kx) * nt + b)];
        y[static_cast<std::size_t>((o * nx + kx) * nt + b)] = acc;
      }
  return y;
}

namespace {

Tensor act(const Tensor& x, Activation kind) {
  Tensor y(x.shape());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double v = x[k];
    if (kind == Activation::gelu)
      y[k] = 0.5 * v * (1.0 + std::erf(v / std::numbers::sqrt2));
    else
      y[k] = v > 0.0 ? v : 0.0;
  }
  return y;
}

}  // namespace

Tensor fno_forward(const Tensor& encoded, const FnoParams& params, const FnoConfig& config) {
  Tensor z = ref::pointwise_linear(encoded, params.lift_weight, params.lift_bias);
  for (const auto& layer : params.layers) {
    Tensor affine = ref::pointwise_linear(z, layer.pointwise_weight, layer.pointwise_bias);
    CTensor zc(z.shape());
    for (std::size_t k = 0; k < z.size(); ++k) zc[k] = cplx{z[k], 0.0};
    CTensor mixed = ref::spectral_multiply(dft2(zc, false), layer.spectral_weight);
    CTensor back = dft2(mixed, true);
    Tensor combined(z.shape());
    for (std::size_t k = 0; k < combined.size(); ++k)
      combined[k] = affine[k] + back[k].real();
    z = act(combined, config.act);
  }
  Tensor hidden =
      act(ref::pointwise_linear(z, params.proj1_weight, params.proj1_bias), config.act);
  return ref::pointwise_linear(hidden, params.proj2_weight, params.proj2_bias);
}

DensityField simulate_lwr(const std::vector<double>& ic, const std::vector<double>& bc,
                          const FundamentalDiagram& fd, const GridSpec& grid,
                          bool closed_boundaries) {
  const int nx = grid.nx, nt = grid.nt;
  const double u_max = fd.u_max();
  const double u_cr = u_max / 2.0;
  const double v = fd.v_max_mps();
  const double q_cap = u_max * v / 4.0;
  auto dem = [&](double u) { return u <= u_cr ? u * v * (1.0 - u / u_max) : q_cap; };
  auto sup = [&](double u) { return u > u_cr ? u * v * (1.0 - u / u_max) : q_cap; };

  DensityField f(grid);
  for (int i = 0; i < nx; ++i) f.at(i, 0) = ic[i];
  for (int j = 0; j + 1 < nt; ++j) {
    for (int i = 0; i < nx; ++i) {
      double q_in, q_out;
      if (i == 0)
        q_in = closed_boundaries ? 0.0 : std::min(dem(f.at(0, j)), sup(f.at(0, j)));
      else
        q_in = std::min(dem(f.at(i - 1, j)), sup(f.at(i, j)));
      if (i == nx - 1)
        q_out = closed_boundaries ? 0.0 : std::min(dem(f.at(i, j)), sup(bc[j]));
      else
        q_out = std::min(dem(f.at(i, j)), sup(f.at(i + 1, j)));
      f.at(i, j + 1) =
          std::clamp(f.at(i, j) + grid.dt_s / grid.dx_m * (q_in - q_out), 0.0, u_max);
    }
  }
  return f;
}

Tensor conservation_residual(const Tensor& field, const FundamentalDiagram& fd,
                             const GridSpec& grid) {
  const std::int64_t nx = grid.nx, nt = grid.nt;
  const double u_max = fd.u_max();
  const double u_cr = u_max / 2.0;
  const double v = fd.v_max_mps();
  const double q_cap = u_max * v / 4.0;
  auto clamped = [&](std::int64_t i, std::int64_t j) {
    return std::clamp(field[static_cast<std::size_t>(i * nt + j)], 0.0, u_max);
  };
  auto flux_between = [&](std::int64_t i_up, std::int64_t i_dn, std::int64_t j) {
    const double up = clamped(i_up, j), dn = clamped(i_dn, j);
    const double dem = up <= u_cr ? up * v * (1.0 - up / u_max) : q_cap;
    const double sup = dn > u_cr ? dn * v * (1.0 - dn / u_max) : q_cap;
    return std::min(dem, sup);
  };

  Tensor res({nx - 2, nt - 1});
  for (std::int64_t i = 1; i + 1 < nx; ++i)
    for (std::int64_t j = 0; j + 1 < nt; ++j) {
      const double q_in = flux_between(i - 1, i, j);
      const double q_out = flux_between(i, i + 1, j);
      const double stepped = field[static_cast<std::size_t>(i * nt + j)] +
                             grid.dt_s / grid.dx_m * (q_in - q_out);
      res[static_cast<std::size_t>((i - 1) * (nt - 1) + j)] =
          (field[static_cast<std::size_t>(i * nt + j + 1)] - stepped) / u_max;
    }
  return res;
}

}  // namespace lwrfno::ref
