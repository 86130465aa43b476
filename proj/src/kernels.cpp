#include "lwrfno/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lwrfno/fft.hpp"

namespace lwrfno {

namespace {

void check_rank3(const Tensor& x, const char* who) {
  if (x.shape().size() != 3) throw std::invalid_argument(std::string(who) + ": expected rank-3 input");
}

// Forward DFT of a real block, keeping only the retained modes: full-length
// transforms along t per row, then one column transform per retained kt.
// Output compact (c, mx, mt).
CTensor retained_spectrum(const Tensor& z, std::int64_t mx, std::int64_t mt) {
  const std::int64_t c = z.shape()[0], nx = z.shape()[1], nt = z.shape()[2];
  const fft::FftPlan& plan_t = fft::plan_for(static_cast<std::size_t>(nt));
  const fft::FftPlan& plan_x = fft::plan_for(static_cast<std::size_t>(nx));

  CTensor out({c, mx, mt});
#pragma omp parallel for schedule(static)
  for (std::int64_t ch = 0; ch < c; ++ch) {
    std::vector<cplx> rows(static_cast<std::size_t>(nx) * nt);
    std::vector<cplx> row_in(nt), col_in(nx), col_out(nx);
    for (std::int64_t i = 0; i < nx; ++i) {
      const double* src = z.data() + (ch * nx + i) * nt;
      for (std::int64_t j = 0; j < nt; ++j) row_in[j] = cplx{src[j], 0.0};
      plan_t.execute(row_in.data(), 1, rows.data() + i * nt, false);
    }
    for (std::int64_t b = 0; b < mt; ++b) {
      for (std::int64_t i = 0; i < nx; ++i) col_in[i] = rows[i * nt + b];
      plan_x.execute(col_in.data(), 1, col_out.data(), false);
      for (std::int64_t a = 0; a < mx; ++a)
        out[static_cast<std::size_t>((ch * mx + a) * mt + b)] = col_out[mode_bin(a, mx, nx)];
    }
  }
  return out;
}

// Inverse-sign transform of a compact retained-mode spectrum back to a real
// (c, nx, nt) block, scaled by `scale` (1/(nx*nt) for the forward path, 1
// for the adjoint of the real-input forward transform).
Tensor retained_inverse_real(const CTensor& compact, std::int64_t nx, std::int64_t nt,
                             double scale) {
  const std::int64_t c = compact.shape()[0], mx = compact.shape()[1], mt = compact.shape()[2];
  const fft::FftPlan& plan_t = fft::plan_for(static_cast<std::size_t>(nt));
  const fft::FftPlan& plan_x = fft::plan_for(static_cast<std::size_t>(nx));

  Tensor out({c, nx, nt});
#pragma omp parallel for schedule(static)
  for (std::int64_t ch = 0; ch < c; ++ch) {
    std::vector<cplx> grid(static_cast<std::size_t>(nx) * nt, cplx{0.0, 0.0});
    std::vector<cplx> col_in(nx, cplx{0.0, 0.0}), col_out(nx), row_out(nt);
    for (std::int64_t b = 0; b < mt; ++b) {
      std::fill(col_in.begin(), col_in.end(), cplx{0.0, 0.0});
      for (std::int64_t a = 0; a < mx; ++a)
        col_in[mode_bin(a, mx, nx)] = compact[static_cast<std::size_t>((ch * mx + a) * mt + b)];
      plan_x.execute(col_in.data(), 1, col_out.data(), true);
      for (std::int64_t i = 0; i < nx; ++i) grid[i * nt + b] = col_out[i];
    }
    double* dst = out.data() + ch * nx * nt;
    for (std::int64_t i = 0; i < nx; ++i) {
      plan_t.execute(grid.data() + i * nt, 1, row_out.data(), true);
      for (std::int64_t j = 0; j < nt; ++j) dst[i * nt + j] = row_out[j].real() * scale;
    }
  }
  return out;
}

// compact channel mixing: y[o,k] = sum_i r[o,i,k] * x[i,k] (or conj(r))
CTensor compact_mix(const CTensor& x, const CTensor& r, bool conjugate, bool transpose) {
  const std::int64_t co = r.shape()[0], ci = r.shape()[1];
  const std::int64_t mx = r.shape()[2], mt = r.shape()[3];
  const std::int64_t modes = mx * mt;
  const std::int64_t out_c = transpose ? ci : co;
  const std::int64_t in_c = transpose ? co : ci;
  CTensor y({out_c, mx, mt});
  for (std::int64_t o = 0; o < out_c; ++o)
    for (std::int64_t k = 0; k < modes; ++k) {
      cplx acc{0.0, 0.0};
      for (std::int64_t i = 0; i < in_c; ++i) {
        const std::size_t ridx = transpose ? static_cast<std::size_t>((i * ci + o) * modes + k)
                                           : static_cast<std::size_t>((o * ci + i) * modes + k);
        const cplx w = conjugate ? std::conj(r[ridx]) : r[ridx];
        acc += w * x[static_cast<std::size_t>(i * modes + k)];
      }
      y[static_cast<std::size_t>(o * modes + k)] = acc;
    }
  return y;
}

}  // namespace

Tensor pointwise_linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  check_rank3(x, "pointwise_linear");
  const std::int64_t ci = x.shape()[0], nx = x.shape()[1], nt = x.shape()[2];
  if (w.shape().size() != 2 || w.shape()[1] != ci)
    throw std::invalid_argument("pointwise_linear: weight shape mismatch");
  const std::int64_t co = w.shape()[0];
  if (b.shape() != std::vector<std::int64_t>{co})
    throw std::invalid_argument("pointwise_linear: bias shape mismatch");

  const std::int64_t np = nx * nt;
  Tensor y({co, nx, nt});
#pragma omp parallel for schedule(static)
  for (std::int64_t o = 0; o < co; ++o) {
    double* __restrict yo = y.data() + o * np;
    std::fill(yo, yo + np, b[static_cast<std::size_t>(o)]);
    for (std::int64_t i = 0; i < ci; ++i) {
      const double wij = w[static_cast<std::size_t>(o * ci + i)];
      const double* __restrict xi = x.data() + i * np;
      for (std::int64_t p = 0; p < np; ++p) yo[p] += wij * xi[p];
    }
  }
  return y;
}

void pointwise_linear_backward(const Tensor& gy, const Tensor& x, const Tensor& w,
                               Tensor& gx, Tensor& gw, Tensor& gb) {
  const std::int64_t ci = x.shape()[0], np = x.shape()[1] * x.shape()[2];
  const std::int64_t co = w.shape()[0];
  gx = Tensor(x.shape());
  gw = Tensor(w.shape());
  gb = Tensor({co});

  // gx tiled over grid points (parallel across disjoint tiles) so gy streams
  // through exactly once; per-element accumulation order over o is fixed
  constexpr std::int64_t kTile = 256;
  const std::int64_t n_tiles = (np + kTile - 1) / kTile;
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < n_tiles; ++t) {
    const std::int64_t p0 = t * kTile;
    const std::int64_t p1 = std::min(np, p0 + kTile);
    for (std::int64_t o = 0; o < co; ++o) {
      const double* __restrict gyo = gy.data() + o * np;
      for (std::int64_t i = 0; i < ci; ++i) {
        const double wij = w[static_cast<std::size_t>(o * ci + i)];
        double* __restrict gxi = gx.data() + i * np;
        for (std::int64_t p = p0; p < p1; ++p) gxi[p] += wij * gyo[p];
      }
    }
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t o = 0; o < co; ++o) {
    const double* __restrict gyo = gy.data() + o * np;
    double* __restrict gwo = gw.data() + o * ci;
    for (std::int64_t p0 = 0; p0 < np; p0 += kTile) {
      const std::int64_t p1 = std::min(np, p0 + kTile);
      for (std::int64_t i = 0; i < ci; ++i) {
        const double* __restrict xi = x.data() + i * np;
        double acc = 0.0;
        for (std::int64_t p = p0; p < p1; ++p) acc += gyo[p] * xi[p];
        gwo[i] += acc;
      }
    }
    double acc = 0.0;
    for (std::int64_t p = 0; p < np; ++p) acc += gyo[p];
    gb[static_cast<std::size_t>(o)] = acc;
  }
}

CTensor spectral_multiply(const CTensor& x, const CTensor& r) {
  if (x.shape().size() != 3 || r.shape().size() != 4)
    throw std::invalid_argument("spectral_multiply: expected x rank 3, r rank 4");
  const std::int64_t ci = x.shape()[0], nx = x.shape()[1], nt = x.shape()[2];
  const std::int64_t co = r.shape()[0], mx = r.shape()[2], mt = r.shape()[3];
  if (r.shape()[1] != ci) throw std::invalid_argument("spectral_multiply: channel mismatch");
  if (mx > nx || mt > nt)
    throw std::invalid_argument("spectral_multiply: mode count exceeds grid size");

  CTensor y({co, nx, nt});
#pragma omp parallel for schedule(static)
  for (std::int64_t o = 0; o < co; ++o) {
    for (std::int64_t a = 0; a < mx; ++a) {
      const std::int64_t kx = mode_bin(a, mx, nx);
      for (std::int64_t b = 0; b < mt; ++b) {
        const std::int64_t kt = b;  // leading temporal frequencies only
        cplx acc{0.0, 0.0};
        for (std::int64_t i = 0; i < ci; ++i)
          acc += r[static_cast<std::size_t>(((o * ci + i) * mx + a) * mt + b)] *
                 x[static_cast<std::size_t>((i * nx + kx) * nt + kt)];
        y[static_cast<std::size_t>((o * nx + kx) * nt + kt)] = acc;
      }
    }
  }
  return y;
}

void spectral_multiply_backward(const CTensor& gy, const CTensor& x, const CTensor& r,
                                CTensor& gx, CTensor& gr) {
  const std::int64_t ci = x.shape()[0], nx = x.shape()[1], nt = x.shape()[2];
  const std::int64_t co = r.shape()[0], mx = r.shape()[2], mt = r.shape()[3];
  gx = CTensor(x.shape());
  gr = CTensor(r.shape());

#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < ci; ++i) {
    for (std::int64_t a = 0; a < mx; ++a) {
      const std::int64_t kx = mode_bin(a, mx, nx);
      for (std::int64_t b = 0; b < mt; ++b) {
        cplx acc{0.0, 0.0};
        for (std::int64_t o = 0; o < co; ++o)
          acc += std::conj(r[static_cast<std::size_t>(((o * ci + i) * mx + a) * mt + b)]) *
                 gy[static_cast<std::size_t>((o * nx + kx) * nt + b)];
        gx[static_cast<std::size_t>((i * nx + kx) * nt + b)] = acc;
      }
    }
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t o = 0; o < co; ++o) {
    for (std::int64_t i = 0; i < ci; ++i) {
      for (std::int64_t a = 0; a < mx; ++a) {
        const std::int64_t kx = mode_bin(a, mx, nx);
        for (std::int64_t b = 0; b < mt; ++b)
          gr[static_cast<std::size_t>(((o * ci + i) * mx + a) * mt + b)] =
              gy[static_cast<std::size_t>((o * nx + kx) * nt + b)] *
              std::conj(x[static_cast<std::size_t>((i * nx + kx) * nt + b)]);
      }
    }
  }
}

Tensor activation_forward(const Tensor& x, Activation act, Tensor* deriv) {
  Tensor y(x.shape());
  if (deriv) *deriv = Tensor(x.shape());
  const std::int64_t n = static_cast<std::int64_t>(x.size());
  constexpr double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
  constexpr double inv_sqrt2pi = 0.3989422804014326779399461;  // 1/sqrt(2*pi)

  if (act == Activation::gelu) {
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
      const double v = x[k];
      const double cdf = 0.5 * (1.0 + std::erf(v * inv_sqrt2));
      y[k] = v * cdf;
      if (deriv) (*deriv)[k] = cdf + v * inv_sqrt2pi * std::exp(-0.5 * v * v);
    }
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
      const double v = x[k];
      y[k] = v > 0.0 ? v : 0.0;
      if (deriv) (*deriv)[k] = v > 0.0 ? 1.0 : 0.0;
    }
  }
  return y;
}

Tensor spectral_conv(const Tensor& z, const CTensor& r, CTensor* save_spectrum) {
  check_rank3(z, "spectral_conv");
  const std::int64_t ci = z.shape()[0], nx = z.shape()[1], nt = z.shape()[2];
  if (r.shape().size() != 4 || r.shape()[1] != ci)
    throw std::invalid_argument("spectral_conv: weight shape mismatch");
  const std::int64_t mx = r.shape()[2], mt = r.shape()[3];
  if (mx > nx || mt > nt)
    throw std::invalid_argument("spectral_conv: mode count exceeds grid size");

  CTensor spectrum = retained_spectrum(z, mx, mt);
  CTensor mixed = compact_mix(spectrum, r, false, false);
  if (save_spectrum) *save_spectrum = std::move(spectrum);
  return retained_inverse_real(mixed, nx, nt, 1.0 / static_cast<double>(nx * nt));
}

void spectral_conv_backward(const Tensor& g, const CTensor& saved_spectrum, const CTensor& r,
                            Tensor& gz, CTensor& gr) {
  const std::int64_t nx = g.shape()[1], nt = g.shape()[2];
  const std::int64_t mx = r.shape()[2], mt = r.shape()[3];
  const std::int64_t modes = mx * mt;
  const std::int64_t co = r.shape()[0], ci = r.shape()[1];

  // adjoint of the real inverse transform, read at the retained modes
  CTensor g_mixed = retained_spectrum(g, mx, mt);
  const double norm = 1.0 / static_cast<double>(nx * nt);
  for (std::size_t k = 0; k < g_mixed.size(); ++k) g_mixed[k] *= norm;

  // weight gradient: outer product against the saved forward spectrum
  gr = CTensor(r.shape());
  for (std::int64_t o = 0; o < co; ++o)
    for (std::int64_t i = 0; i < ci; ++i)
      for (std::int64_t k = 0; k < modes; ++k)
        gr[static_cast<std::size_t>((o * ci + i) * modes + k)] =
            g_mixed[static_cast<std::size_t>(o * modes + k)] *
            std::conj(saved_spectrum[static_cast<std::size_t>(i * modes + k)]);

  // input gradient: conjugate-transposed mixing, then the adjoint of the
  // real-input forward transform (unnormalized inverse, real part)
  CTensor g_spec = compact_mix(g_mixed, r, true, true);
  gz = retained_inverse_real(g_spec, nx, nt, 1.0);
}

CTensor to_complex(const Tensor& x) {
  CTensor y(x.shape());
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = cplx{x[k], 0.0};
  return y;
}

Tensor take_real(const CTensor& x) {
  Tensor y(x.shape());
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k].real();
  return y;
}

Tensor conservation_residual(const Tensor& field, const FundamentalDiagram& fd,
                             const GridSpec& grid, ResidualRecord* record) {
  const std::int64_t nx = grid.nx, nt = grid.nt;
  if (static_cast<std::int64_t>(field.size()) != nx * nt)
    throw std::invalid_argument("conservation_residual: field size != nx*nt");
  if (nx < 3 || nt < 2)
    throw std::invalid_argument("conservation_residual: need nx >= 3 and nt >= 2");

  if (record) {
    record->clamp_ok.assign(static_cast<std::size_t>(nx) * nt, 0);
    record->demand_side.assign(static_cast<std::size_t>(nx - 1) * (nt - 1), 0);
  }

  const double u_max = fd.u_max();
  const double coef = grid.dt_s / grid.dx_m;
  const double inv_umax = 1.0 / u_max;
  const double* f = field.data();
  Tensor res({nx - 2, nt - 1});

  // Column-major over time so each column's interface fluxes are built once.
  std::vector<double> q(static_cast<std::size_t>(nx));  // interfaces 1..nx-1
  for (std::int64_t j = 0; j + 1 < nt; ++j) {
    for (std::int64_t i = 1; i < nx; ++i) {
      const double raw_up = f[(i - 1) * nt + j];
      const double raw_dn = f[i * nt + j];
      const double up = std::clamp(raw_up, 0.0, u_max);
      const double dn = std::clamp(raw_dn, 0.0, u_max);
      const double dem = fd.demand_si(up);
      const double sup = fd.supply_si(dn);
      const bool take_dem = dem <= sup;  // ties propagate through demand
      q[i] = take_dem ? dem : sup;
      if (record) {
        record->demand_side[(i - 1) * (nt - 1) + j] = take_dem ? 1 : 0;
        if (raw_up >= 0.0 && raw_up <= u_max) record->clamp_ok[(i - 1) * nt + j] = 1;
        if (raw_dn >= 0.0 && raw_dn <= u_max) record->clamp_ok[i * nt + j] = 1;
      }
    }
    // same floating-point expression as the solver update, so a solver field
    // zeroes the residual bit-for-bit
    for (std::int64_t i = 1; i + 1 < nx; ++i) {
      const double predicted = f[i * nt + j] + coef * (q[i] - q[i + 1]);
      res[static_cast<std::size_t>((i - 1) * (nt - 1) + j)] =
          (f[i * nt + j + 1] - predicted) * inv_umax;
    }
  }
  return res;
}

void conservation_residual_backward(const Tensor& gres, const Tensor& field,
                                    const ResidualRecord& record, Tensor& gfield) {
  const std::int64_t nx = record.grid.nx, nt = record.grid.nt;
  const FundamentalDiagram& fd = record.fd;
  const double u_max = fd.u_max();
  const double coef = record.grid.dt_s / record.grid.dx_m;
  const double inv_umax = 1.0 / u_max;
  gfield = Tensor(field.shape());
  const double* f = field.data();

  auto clamp_ok = [&](std::int64_t i, std::int64_t j) {
    return record.clamp_ok[static_cast<std::size_t>(i * nt + j)] != 0;
  };
  // d q[i,j] / d field: through the selected branch of min(demand, supply),
  // zero outside the clamp range
  auto add_flux_grad = [&](std::int64_t i, std::int64_t j, double coeff) {
    if (record.demand_side[static_cast<std::size_t>((i - 1) * (nt - 1) + j)]) {
      if (clamp_ok(i - 1, j)) {
        const double up = std::clamp(f[(i - 1) * nt + j], 0.0, u_max);
        gfield[static_cast<std::size_t>((i - 1) * nt + j)] += coeff * fd.demand_slope_si(up);
      }
    } else {
      if (clamp_ok(i, j)) {
        const double dn = std::clamp(f[i * nt + j], 0.0, u_max);
        gfield[static_cast<std::size_t>(i * nt + j)] += coeff * fd.supply_slope_si(dn);
      }
    }
  };

  for (std::int64_t j = 0; j + 1 < nt; ++j) {
    for (std::int64_t i = 1; i + 1 < nx; ++i) {
      const double g = gres[static_cast<std::size_t>((i - 1) * (nt - 1) + j)] * inv_umax;
      if (g == 0.0) continue;
      gfield[static_cast<std::size_t>(i * nt + j + 1)] += g;
      gfield[static_cast<std::size_t>(i * nt + j)] -= g;
      add_flux_grad(i, j, -g * coef);      // inflow interface q[i]
      add_flux_grad(i + 1, j, +g * coef);  // outflow interface q[i+1]
    }
  }
}

}  // namespace lwrfno
