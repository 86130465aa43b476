#pragma once

#include <cstdint>
#include <vector>

#include "lwrfno/fundamental_diagram.hpp"
#include "lwrfno/grid.hpp"
#include "lwrfno/tensor.hpp"

namespace lwrfno {

enum class Activation { gelu, relu };

// Forward kernels for the operator network, OpenMP-parallel with fixed
// per-element summation order (results are bit-identical for any thread
// count). Shapes: x (c_in, nx, nt), w (c_out, c_in), b (c_out).

/// Per-grid-point affine map across channels: y[o,p] = b[o] + sum_i w[o,i] x[i,p].
Tensor pointwise_linear(const Tensor& x, const Tensor& w, const Tensor& b);

void pointwise_linear_backward(const Tensor& gy, const Tensor& x, const Tensor& w,
                               Tensor& gx, Tensor& gw, Tensor& gb);

/// Per-retained-mode channel mixing on a full 2-D spectrum. The weight
/// r (c_out, c_in, m_x, m_t) addresses the m_x lowest spatial frequencies
/// split between the positive and negative corner blocks and the m_t leading
/// temporal frequencies; every other mode of the output is zero.
CTensor spectral_multiply(const CTensor& x, const CTensor& r);

void spectral_multiply_backward(const CTensor& gy, const CTensor& x, const CTensor& r,
                                CTensor& gx, CTensor& gr);

/// FFT bin for spectral-weight slot a of m retained modes on an axis of n
/// bins: the first ceil(m/2) slots are frequencies 0,1,... and the remaining
/// floor(m/2) slots the most negative frequencies n-floor(m/2),...,n-1.
inline std::int64_t mode_bin(std::int64_t a, std::int64_t m, std::int64_t n) {
  const std::int64_t n_pos = (m + 1) / 2;
  return a < n_pos ? a : n - (m - a);
}

/// Elementwise activation; when `deriv` is non-null it receives d(act)/dx at
/// the inputs (saved by the tape so the backward pass is a pure multiply).
Tensor activation_forward(const Tensor& x, Activation act, Tensor* deriv = nullptr);

/// Fused spectral path of one operator layer,
///
///   Re( IFFT2( R . FFT2(z) ) ),
///
/// numerically equal to the composed ops but transforming only the spectrum
/// rows/columns that survive the mode truncation. When `save_spectrum` is
/// given it receives the forward spectrum restricted to the retained modes,
/// compact shape (c_in, m_x, m_t), which is all the backward pass needs.
Tensor spectral_conv(const Tensor& z, const CTensor& r, CTensor* save_spectrum = nullptr);

void spectral_conv_backward(const Tensor& g, const CTensor& saved_spectrum, const CTensor& r,
                            Tensor& gz, CTensor& gr);

CTensor to_complex(const Tensor& x);
Tensor take_real(const CTensor& x);

/// Bookkeeping recorded by the conservation-residual forward pass: which
/// cells were inside [0, u_max] (clamp pass-through) and which side of the
/// min() each interface flux selected (ties go to demand).
struct ResidualRecord {
  FundamentalDiagram fd;
  GridSpec grid;
  std::vector<std::uint8_t> clamp_ok;     // nx*nt
  std::vector<std::uint8_t> demand_side;  // (nx-1)*(nt-1), interface i in [1,nx-1)
  ResidualRecord(const FundamentalDiagram& f, const GridSpec& g) : fd(f), grid(g) {}
};

/// Discrete conservation residual of a predicted field (veh/km), normalized
/// by u_max: for interior cells i in [1, nx-2] and steps j in [0, nt-2],
///
///   r[i-1,j] = ( u[i,j+1] - (u[i,j] + dt/dx * (q[i-1/2,j] - q[i+1/2,j])) ) / u_max
///
/// with q the demand/supply interface flux of the clamped field. The inner
/// expression is evaluated exactly like the solver update, so a solver
/// output has residual 0 up to last-bit rounding. Output shape (nx-2, nt-1).
Tensor conservation_residual(const Tensor& field, const FundamentalDiagram& fd,
                             const GridSpec& grid, ResidualRecord* record = nullptr);

void conservation_residual_backward(const Tensor& gres, const Tensor& field,
                                    const ResidualRecord& record, Tensor& gfield);

}  // namespace lwrfno
