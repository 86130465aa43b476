#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lwrfno/fft.hpp"
#include "lwrfno/reference.hpp"
#include "lwrfno/rng.hpp"

using namespace lwrfno;

namespace {

CTensor random_ctensor(std::vector<std::int64_t> shape, std::uint64_t seed) {
  SplitMix64 rng(seed);
  CTensor x(std::move(shape));
  for (std::size_t k = 0; k < x.size(); ++k)
    x[k] = cplx{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  return x;
}

double max_abs_diff(const CTensor& a, const CTensor& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

TEST_CASE("fft2: zeros and DC spectrum") {
  CTensor z({1, 8, 12});
  CTensor Z = fft::fft2(z);
  for (std::size_t k = 0; k < Z.size(); ++k) CHECK(std::abs(Z[k]) == 0.0);

  CTensor c({1, 5, 6});
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = cplx{2.5, 0.0};
  CTensor C = fft::fft2(c);
  CHECK(std::abs(C[0] - cplx{2.5 * 30.0, 0.0}) < 1e-12);
  for (std::size_t k = 1; k < C.size(); ++k) CHECK(std::abs(C[k]) < 1e-10);
}

TEST_CASE("fft2: round trip at awkward lengths") {
  // mixed-radix sizes, primes (Bluestein) and the working grids
  const std::vector<std::pair<int, int>> sizes = {
      {1, 1},  {2, 3},   {4, 4},   {5, 7},   {8, 9},  {12, 10}, {16, 17}, {25, 31},
      {32, 120}, {50, 600}, {97, 3}, {101, 4}, {49, 18},
  };
  int case_id = 0;
  for (auto [nx, nt] : sizes) {
    CTensor x = random_ctensor({2, nx, nt}, 1000 + case_id++);
    CTensor back = fft::ifft2(fft::fft2(x));
    CHECK(max_abs_diff(back, x) < 1e-10);
  }
}

TEST_CASE("fft2: agrees with the by-definition DFT") {
  for (auto [nx, nt] : std::vector<std::pair<int, int>>{{7, 9}, {16, 17}, {50, 60}, {31, 8}}) {
    CTensor x = random_ctensor({1, nx, nt}, 7 * nx + nt);
    CHECK(max_abs_diff(fft::fft2(x), ref::dft2(x, false)) < 1e-9);
    CHECK(max_abs_diff(fft::ifft2(x), ref::dft2(x, true)) < 1e-9);
  }
}

TEST_CASE("fft2: linearity") {
  CTensor a = random_ctensor({1, 12, 15}, 51);
  CTensor b = random_ctensor({1, 12, 15}, 52);
  CTensor sum(a.shape());
  const cplx alpha{0.7, -0.3};
  for (std::size_t k = 0; k < a.size(); ++k) sum[k] = alpha * a[k] + b[k];
  CTensor lhs = fft::fft2(sum);
  CTensor fa = fft::fft2(a), fb = fft::fft2(b);
  CTensor rhs(a.shape());
  for (std::size_t k = 0; k < a.size(); ++k) rhs[k] = alpha * fa[k] + fb[k];
  CHECK(max_abs_diff(lhs, rhs) < 1e-10);
}

TEST_CASE("fft2: Parseval identity") {
  CTensor x = random_ctensor({3, 50, 60}, 53);
  CTensor X = fft::fft2(x);
  double ex = 0.0, eX = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) ex += std::norm(x[k]);
  for (std::size_t k = 0; k < X.size(); ++k) eX += std::norm(X[k]);
  CHECK(std::abs(ex - eX / (50.0 * 60.0)) / ex < 1e-10);
}

TEST_CASE("fft2: adjoint identity") {
  // <fft2(x), y> == <x, nx*nt*ifft2(y)> under the real inner product
  CTensor x = random_ctensor({2, 25, 18}, 54);
  CTensor y = random_ctensor({2, 25, 18}, 55);
  const double lhs = dot_re(fft::fft2(x), y);
  CTensor adj = fft::fft2_adjoint(y);
  const double rhs = dot_re(x, adj);
  CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-12);

  // and fft2_adjoint is nx*nt * ifft2
  CTensor scaled = fft::ifft2(y);
  for (std::size_t k = 0; k < scaled.size(); ++k) scaled[k] *= 25.0 * 18.0;
  CHECK(max_abs_diff(adj, scaled) < 1e-10);
}

TEST_CASE("fft2: deterministic across calls") {
  CTensor x = random_ctensor({4, 50, 120}, 56);
  CTensor a = fft::fft2(x);
  CTensor b = fft::fft2(x);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].real() == b[k].real());
    CHECK(a[k].imag() == b[k].imag());
  }
}
