#include "lwrfno/fft.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace lwrfno::fft {

namespace {

// Factor into {2,3,4,5,7} sorted ascending so the recursion bottoms out in
// the largest direct kernel; empty result means a prime factor > 7 remains
// and the plan falls back to Bluestein.
std::vector<std::size_t> smooth_factorization(std::size_t n) {
  std::vector<std::size_t> factors;
  std::size_t twos = 0;
  while (n % 2 == 0) {
    ++twos;
    n /= 2;
  }
  for (; twos >= 2; twos -= 2) factors.push_back(4);
  if (twos) factors.push_back(2);
  for (std::size_t p : {3ul, 5ul, 7ul})
    while (n % p == 0) {
      factors.push_back(p);
      n /= p;
    }
  if (n != 1) return {};
  std::sort(factors.begin(), factors.end());
  return factors;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

thread_local std::vector<cplx> tl_scratch_a;
thread_local std::vector<cplx> tl_scratch_b;
thread_local std::vector<cplx> tl_scratch_c;

constexpr double kSqrt3Half = 0.86602540378443864676;  // sin(pi/3)
constexpr double kCos2Pi5 = 0.30901699437494742410;    // cos(2*pi/5)
constexpr double kCos4Pi5 = -0.80901699437494742410;   // cos(4*pi/5)
constexpr double kSin2Pi5 = 0.95105651629515357212;    // sin(2*pi/5)
constexpr double kSin4Pi5 = 0.58778525229247312917;    // sin(4*pi/5)

// 5-point butterfly on already-twiddled inputs; `inverse` flips the spectral
// rotation sign. Outputs are written with stride `om`.
inline void butterfly5(const cplx t0, const cplx t1, const cplx t2, const cplx t3,
                       const cplx t4, cplx* out, std::size_t om, bool inverse) {
  const cplx a1 = t1 + t4, a2 = t1 - t4;
  const cplx a3 = t2 + t3, a4 = t2 - t3;
  const cplx m1 = t0 + kCos2Pi5 * a1 + kCos4Pi5 * a3;
  const cplx m2 = t0 + kCos4Pi5 * a1 + kCos2Pi5 * a3;
  const cplx w1 = kSin2Pi5 * a2 + kSin4Pi5 * a4;
  const cplx w2 = kSin4Pi5 * a2 - kSin2Pi5 * a4;
  // forward: X = m -+ i*w ; inverse conjugates the rotation
  const cplx iw1 = inverse ? cplx{-w1.imag(), w1.real()} : cplx{w1.imag(), -w1.real()};
  const cplx iw2 = inverse ? cplx{-w2.imag(), w2.real()} : cplx{w2.imag(), -w2.real()};
  out[0] = t0 + a1 + a3;
  out[om] = m1 + iw1;
  out[2 * om] = m2 + iw2;
  out[3 * om] = m2 - iw2;
  out[4 * om] = m1 - iw1;
}

}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("FftPlan: length must be >= 1");
  factors_ = n == 1 ? std::vector<std::size_t>{} : smooth_factorization(n);

  twiddle_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double ang = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    twiddle_[j] = cplx{std::cos(ang), std::sin(ang)};
  }

  if (factors_.empty() && n > 1) {
    // Bluestein: FFT_n as a circular convolution with a chirp, carried by a
    // power-of-two sub-plan of length >= 2n-1.
    conv_n_ = next_pow2(2 * n - 1);
    conv_plan_ = std::make_unique<FftPlan>(conv_n_);
    chirp_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      // j^2 mod 2n keeps the angle reduction exact
      const std::size_t j2 = (j * j) % (2 * n);
      const double ang = -std::numbers::pi * static_cast<double>(j2) / static_cast<double>(n);
      chirp_[j] = cplx{std::cos(ang), std::sin(ang)};
    }
    std::vector<cplx> kernel(conv_n_, cplx{0.0, 0.0});
    kernel[0] = std::conj(chirp_[0]);
    for (std::size_t j = 1; j < n; ++j) {
      kernel[j] = std::conj(chirp_[j]);
      kernel[conv_n_ - j] = std::conj(chirp_[j]);
    }
    chirp_kernel_fft_.resize(conv_n_);
    conv_plan_->execute(kernel.data(), 1, chirp_kernel_fft_.data(), false);
  }
}

void FftPlan::radix_rec(const cplx* in, std::size_t stride, cplx* out, cplx* scratch,
                        std::size_t n, std::size_t level, bool inverse) const {
  const std::size_t r = factors_[level];

  // leaf: single remaining factor, direct kernel on strided input
  if (n == r) {
    switch (r) {
      case 2: {
        const cplx a = in[0], b = in[stride];
        out[0] = a + b;
        out[1] = a - b;
        return;
      }
      case 3: {
        const cplx t0 = in[0], t1 = in[stride], t2 = in[2 * stride];
        const cplx s = t1 + t2, d = t1 - t2;
        const double sf = inverse ? kSqrt3Half : -kSqrt3Half;
        const cplx rot{-sf * d.imag(), sf * d.real()};  // i * sf * d
        out[0] = t0 + s;
        out[1] = t0 - 0.5 * s + rot;
        out[2] = t0 - 0.5 * s - rot;
        return;
      }
      case 4: {
        const cplx t0 = in[0], t1 = in[stride], t2 = in[2 * stride], t3 = in[3 * stride];
        const cplx u0 = t0 + t2, u1 = t0 - t2, u2 = t1 + t3, u3 = t1 - t3;
        const cplx ju3 = inverse ? cplx{-u3.imag(), u3.real()} : cplx{u3.imag(), -u3.real()};
        out[0] = u0 + u2;
        out[1] = u1 + ju3;
        out[2] = u0 - u2;
        out[3] = u1 - ju3;
        return;
      }
      case 5: {
        butterfly5(in[0], in[stride], in[2 * stride], in[3 * stride], in[4 * stride], out, 1,
                   inverse);
        return;
      }
      default: {  // 7: direct small DFT via the shared root table
        const std::size_t scale = n_ / r;
        for (std::size_t b = 0; b < r; ++b) {
          cplx acc = in[0];
          for (std::size_t q = 1; q < r; ++q) {
            const cplx w = twiddle_[((q * b) % r) * scale];
            acc += (inverse ? std::conj(w) : w) * in[q * stride];
          }
          out[b] = acc;
        }
        return;
      }
    }
  }

  const std::size_t m = n / r;
  for (std::size_t q = 0; q < r; ++q)
    radix_rec(in + q * stride, stride * r, scratch + q * m, out + q * m, m, level + 1, inverse);

  // combine: out[a + b*m] = sum_q w_r^(qb) * (scratch[q*m + a] * w_n^(qa))
  const std::size_t tw_scale = n_ / n;
  switch (r) {
    case 2: {
      for (std::size_t a = 0; a < m; ++a) {
        const cplx w = inverse ? std::conj(twiddle_[a * tw_scale]) : twiddle_[a * tw_scale];
        const cplx t0 = scratch[a];
        const cplx t1 = scratch[m + a] * w;
        out[a] = t0 + t1;
        out[a + m] = t0 - t1;
      }
      return;
    }
    case 3: {
      for (std::size_t a = 0; a < m; ++a) {
        const cplx w1r = twiddle_[a * tw_scale];
        const cplx w2r = twiddle_[2 * a * tw_scale];
        const cplx w1 = inverse ? std::conj(w1r) : w1r;
        const cplx w2 = inverse ? std::conj(w2r) : w2r;
        const cplx t0 = scratch[a];
        const cplx t1 = scratch[m + a] * w1;
        const cplx t2 = scratch[2 * m + a] * w2;
        const cplx s = t1 + t2, d = t1 - t2;
        const double sf = inverse ? kSqrt3Half : -kSqrt3Half;
        const cplx rot{-sf * d.imag(), sf * d.real()};
        out[a] = t0 + s;
        out[a + m] = t0 - 0.5 * s + rot;
        out[a + 2 * m] = t0 - 0.5 * s - rot;
      }
      return;
    }
    case 4: {
      for (std::size_t a = 0; a < m; ++a) {
        const cplx w1r = twiddle_[a * tw_scale];
        const cplx w2r = twiddle_[2 * a * tw_scale];
        const cplx w3r = twiddle_[3 * a * tw_scale];
        const cplx t0 = scratch[a];
        const cplx t1 = scratch[m + a] * (inverse ? std::conj(w1r) : w1r);
        const cplx t2 = scratch[2 * m + a] * (inverse ? std::conj(w2r) : w2r);
        const cplx t3 = scratch[3 * m + a] * (inverse ? std::conj(w3r) : w3r);
        const cplx u0 = t0 + t2, u1 = t0 - t2, u2 = t1 + t3, u3 = t1 - t3;
        const cplx ju3 = inverse ? cplx{-u3.imag(), u3.real()} : cplx{u3.imag(), -u3.real()};
        out[a] = u0 + u2;
        out[a + m] = u1 + ju3;
        out[a + 2 * m] = u0 - u2;
        out[a + 3 * m] = u1 - ju3;
      }
      return;
    }
    case 5: {
      for (std::size_t a = 0; a < m; ++a) {
        const cplx w1r = twiddle_[a * tw_scale];
        const cplx w2r = twiddle_[2 * a * tw_scale];
        const cplx w3r = twiddle_[3 * a * tw_scale];
        const cplx w4r = twiddle_[4 * a * tw_scale];
        butterfly5(scratch[a], scratch[m + a] * (inverse ? std::conj(w1r) : w1r),
                   scratch[2 * m + a] * (inverse ? std::conj(w2r) : w2r),
                   scratch[3 * m + a] * (inverse ? std::conj(w3r) : w3r),
                   scratch[4 * m + a] * (inverse ? std::conj(w4r) : w4r), out + a, m, inverse);
      }
      return;
    }
    default: {  // generic small odd radix (7)
      std::array<cplx, 8> t;
      const std::size_t root_scale = n_ / r;
      for (std::size_t a = 0; a < m; ++a) {
        t[0] = scratch[a];
        for (std::size_t q = 1; q < r; ++q) {
          const cplx w = twiddle_[q * a * tw_scale];
          t[q] = scratch[q * m + a] * (inverse ? std::conj(w) : w);
        }
        for (std::size_t b = 0; b < r; ++b) {
          cplx acc = t[0];
          for (std::size_t q = 1; q < r; ++q) {
            const cplx w = twiddle_[((q * b) % r) * root_scale];
            acc += (inverse ? std::conj(w) : w) * t[q];
          }
          out[a + b * m] = acc;
        }
      }
      return;
    }
  }
}

void FftPlan::bluestein(const cplx* in, std::size_t in_stride, cplx* out, bool inverse) const {
  // inverse via conjugation: idft(x) = conj(dft(conj(x))), both unnormalized
  std::vector<cplx> a(conv_n_, cplx{0.0, 0.0});
  for (std::size_t j = 0; j < n_; ++j) {
    const cplx x = inverse ? std::conj(in[j * in_stride]) : in[j * in_stride];
    a[j] = x * chirp_[j];
  }
  std::vector<cplx> fa(conv_n_);
  conv_plan_->execute(a.data(), 1, fa.data(), false);
  for (std::size_t k = 0; k < conv_n_; ++k) fa[k] *= chirp_kernel_fft_[k];
  conv_plan_->execute(fa.data(), 1, a.data(), true);
  const double inv_m = 1.0 / static_cast<double>(conv_n_);
  for (std::size_t k = 0; k < n_; ++k) {
    const cplx y = a[k] * inv_m * chirp_[k];
    out[k] = inverse ? std::conj(y) : y;
  }
}

void FftPlan::execute(const cplx* in, std::size_t in_stride, cplx* out, bool inverse) const {
  if (n_ == 1) {
    out[0] = in[0];
    return;
  }
  if (factors_.empty()) {
    bluestein(in, in_stride, out, inverse);
    return;
  }
  if (tl_scratch_a.size() < n_) tl_scratch_a.resize(n_);
  radix_rec(in, in_stride, out, tl_scratch_a.data(), n_, 0, inverse);
}

const FftPlan& plan_for(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<FftPlan>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FftPlan>(n);
  return *slot;
}

namespace {

CTensor fft2_with_sign(const CTensor& x, bool inverse) {
  const auto& shape = x.shape();
  if (shape.size() < 2) throw std::invalid_argument("fft2: need at least 2 axes");
  const std::int64_t nx = shape[shape.size() - 2];
  const std::int64_t nt = shape[shape.size() - 1];
  std::int64_t batch = 1;
  for (std::size_t d = 0; d + 2 < shape.size(); ++d) batch *= shape[d];

  const FftPlan& plan_t = plan_for(static_cast<std::size_t>(nt));
  const FftPlan& plan_x = plan_for(static_cast<std::size_t>(nx));

  CTensor y(shape);
  const cplx* src = x.data();
  cplx* dst = y.data();

  const std::int64_t rows = batch * nx;
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < rows; ++r)
    plan_t.execute(src + r * nt, 1, dst + r * nt, inverse);

  // columns: gather into contiguous scratch first so the transform kernels
  // never chase the nt-strided layout
  const std::int64_t cols = batch * nt;
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < cols; ++c) {
    const std::int64_t b = c / nt, j = c % nt;
    cplx* base = dst + b * nx * nt + j;
    if (tl_scratch_b.size() < static_cast<std::size_t>(nx)) tl_scratch_b.resize(nx);
    if (tl_scratch_c.size() < static_cast<std::size_t>(nx)) tl_scratch_c.resize(nx);
    for (std::int64_t i = 0; i < nx; ++i) tl_scratch_c[i] = base[i * nt];
    plan_x.execute(tl_scratch_c.data(), 1, tl_scratch_b.data(), inverse);
    for (std::int64_t i = 0; i < nx; ++i) base[i * nt] = tl_scratch_b[i];
  }
  return y;
}

}  // namespace

CTensor fft2(const CTensor& x) { return fft2_with_sign(x, false); }

CTensor fft2_adjoint(const CTensor& y) { return fft2_with_sign(y, true); }

CTensor ifft2(const CTensor& x) {
  const auto& shape = x.shape();
  CTensor y = fft2_with_sign(x, true);
  const double norm =
      1.0 / static_cast<double>(shape[shape.size() - 2] * shape[shape.size() - 1]);
  for (std::size_t k = 0; k < y.size(); ++k) y[k] *= norm;
  return y;
}

CTensor fft2_real(const Tensor& x) {
  CTensor xc(x.shape());
  for (std::size_t k = 0; k < x.size(); ++k) xc[k] = cplx{x[k], 0.0};
  return fft2_with_sign(xc, false);
}

Tensor ifft2_real(const CTensor& x) {
  const auto& shape = x.shape();
  CTensor y = fft2_with_sign(x, true);
  const double norm =
      1.0 / static_cast<double>(shape[shape.size() - 2] * shape[shape.size() - 1]);
  Tensor out(shape);
  for (std::size_t k = 0; k < y.size(); ++k) out[k] = y[k].real() * norm;
  return out;
}

}  // namespace lwrfno::fft
