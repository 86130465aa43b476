#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "lwrfno/tensor.hpp"

namespace lwrfno::fft {

/// Cached 1-D complex FFT plan for a fixed length. Lengths that factor into
/// {2,3,5,7} run through a recursive mixed-radix Cooley-Tukey kernel with a
/// single precomputed twiddle table; anything with a larger prime factor
/// falls back to Bluestein's chirp-z algorithm on a power-of-two sub-plan,
/// so every length is supported. Transforms are unnormalized in both
/// directions (inverse = conjugate-transpose of forward); callers apply 1/n.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t length() const { return n_; }

  /// out[k] = sum_j in[j*in_stride] * exp(-+ 2*pi*i*j*k/n); out is contiguous
  /// and must not alias the input. `inverse` selects the + sign.
  void execute(const cplx* in, std::size_t in_stride, cplx* out, bool inverse) const;

 private:
  void radix_rec(const cplx* in, std::size_t stride, cplx* out, cplx* scratch,
                 std::size_t n, std::size_t level, bool inverse) const;
  void bluestein(const cplx* in, std::size_t in_stride, cplx* out, bool inverse) const;

  std::size_t n_ = 0;
  std::vector<std::size_t> factors_;   // empty when Bluestein is used
  std::vector<cplx> twiddle_;          // exp(-2*pi*i*j/n), j in [0, n)
  // Bluestein state
  std::size_t conv_n_ = 0;
  std::unique_ptr<FftPlan> conv_plan_;
  std::vector<cplx> chirp_;            // exp(-i*pi*j^2/n)
  std::vector<cplx> chirp_kernel_fft_; // FFT of the padded conjugate chirp
};

/// Shared, thread-safe plan cache keyed by length.
const FftPlan& plan_for(std::size_t n);

/// Unnormalized forward DFT over the last two axes of (lead..., nx, nt),
/// batched over the leading axes; OpenMP-parallel across 1-D transforms.
CTensor fft2(const CTensor& x);

/// Inverse with 1/(nx*nt) normalization, so ifft2(fft2(x)) == x.
CTensor ifft2(const CTensor& x);

/// Unnormalized inverse: the exact adjoint of fft2 under the real inner
/// product on interleaved re/im, used by the reverse pass.
CTensor fft2_adjoint(const CTensor& y);

/// fft2 of a real tensor (promoted to complex internally in one pass).
CTensor fft2_real(const Tensor& x);

/// Real part of ifft2; the spectral-path output of an operator layer.
Tensor ifft2_real(const CTensor& x);

}  // namespace lwrfno::fft
