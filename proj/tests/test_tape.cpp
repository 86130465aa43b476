#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lwrfno/fno.hpp"
#include "lwrfno/godunov.hpp"
#include "lwrfno/reference.hpp"
#include "lwrfno/rng.hpp"
#include "lwrfno/tape.hpp"

using namespace lwrfno;

namespace {

Tensor random_tensor(std::vector<std::int64_t> shape, std::uint64_t seed, double lo = -1.0,
                     double hi = 1.0) {
  SplitMix64 rng(seed);
  Tensor t(std::move(shape));
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = rng.uniform(lo, hi);
  return t;
}

CTensor random_ctensor(std::vector<std::int64_t> shape, std::uint64_t seed) {
  SplitMix64 rng(seed);
  CTensor t(std::move(shape));
  for (std::size_t k = 0; k < t.size(); ++k)
    t[k] = cplx{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  return t;
}

}  // namespace

TEST_CASE("backward: sum gives ones, squared norm gives 2x") {
  Tensor x = random_tensor({3, 4}, 1);
  {
    Tape tape;
    const int xi = tape.leaf(x);
    tape.backward(tape.sum(xi));
    for (std::size_t k = 0; k < x.size(); ++k) CHECK(tape.grad(xi)[k] == 1.0);
  }
  {
    Tape tape;
    const int xi = tape.leaf(x);
    tape.backward(tape.sum(tape.mul(xi, xi)));  // ||x||^2
    for (std::size_t k = 0; k < x.size(); ++k)
      CHECK(tape.grad(xi)[k] == doctest::Approx(2.0 * x[k]).epsilon(1e-14));
  }
  {
    Tape tape;
    const int xi = tape.leaf(x);
    CHECK_THROWS_AS(tape.backward(xi), std::invalid_argument);  // non-scalar loss
  }
}

TEST_CASE("backward: l2norm gradient is x over the norm") {
  Tensor x = random_tensor({17}, 2);
  Tape tape;
  const int xi = tape.leaf(x);
  const int n = tape.l2norm(xi);
  tape.backward(n);
  const double norm = tape.scalar_value(n);
  for (std::size_t k = 0; k < x.size(); ++k)
    CHECK(tape.grad(xi)[k] == doctest::Approx(x[k] / norm).epsilon(1e-12));
}

TEST_CASE("gelu: values and finite-difference gradient") {
  Tensor zero({1});
  Tensor large = Tensor::scalar(20.0);
  Tensor act_zero = activation_forward(zero, Activation::gelu);
  CHECK(act_zero[0] == 0.0);
  Tensor act_large = activation_forward(large, Activation::gelu);
  CHECK(act_large[0] == doctest::Approx(20.0).epsilon(1e-12));

  Tensor x = random_tensor({64}, 3, -3.0, 3.0);
  Tensor deriv;
  activation_forward(x, Activation::gelu, &deriv);
  const double h = 1e-6;
  for (std::size_t k = 0; k < x.size(); ++k) {
    Tensor up = x, dn = x;
    up[k] += h;
    dn[k] -= h;
    const double fd = (activation_forward(up, Activation::gelu)[k] -
                       activation_forward(dn, Activation::gelu)[k]) /
                      (2.0 * h);
    CHECK(deriv[k] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("adjoint identities for the linear primitives") {
  // <adjoint(g), x> == <g, forward(x)> on random data
  SUBCASE("pointwise_linear") {
    Tensor x = random_tensor({3, 4, 5}, 10);
    Tensor w = random_tensor({2, 3}, 11);
    Tensor b({2});
    Tensor g = random_tensor({2, 4, 5}, 12);
    Tensor y = pointwise_linear(x, w, b);
    Tensor gx, gw, gb;
    pointwise_linear_backward(g, x, w, gx, gw, gb);
    CHECK(dot(gx, x) == doctest::Approx(dot(g, y)).epsilon(1e-10));
  }
  SUBCASE("spectral_multiply") {
    CTensor x = random_ctensor({3, 8, 10}, 13);
    CTensor r = random_ctensor({2, 3, 4, 3}, 14);
    CTensor g = random_ctensor({2, 8, 10}, 15);
    CTensor y = spectral_multiply(x, r);
    CTensor gx, gr;
    spectral_multiply_backward(g, x, r, gx, gr);
    // bilinear: the identity holds per argument with the other held fixed
    CHECK(dot_re(gx, x) == doctest::Approx(dot_re(g, y)).epsilon(1e-9));
    CHECK(dot_re(gr, r) == doctest::Approx(dot_re(g, y)).epsilon(1e-9));
  }
  SUBCASE("fft2 and ifft2 via tape") {
    Tape tape;
    CTensor x = random_ctensor({2, 6, 9}, 16);
    const int xi = tape.cleaf(x);
    const int yi = tape.fft2(xi);
    // scalar probe: real inner product against a fixed g
    CTensor g = random_ctensor({2, 6, 9}, 17);
    // build <take_real-style> loss manually: backward from fft with cgrad g
    // is simplest through the public API: loss = sum(Re(fft(x)) * Re(g)) is
    // not expressible directly, so check the kernel-level identity instead.
    (void)yi;
    CTensor fx = fft::fft2(x);
    CTensor adj = fft::fft2_adjoint(g);
    CHECK(dot_re(fx, g) == doctest::Approx(dot_re(x, adj)).epsilon(1e-10));
    CTensor ifx = fft::ifft2(x);
    CTensor fadj = fft::fft2(g);
    const double n = 6.0 * 9.0;
    double rhs = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k)
      rhs += x[k].real() * (fadj[k].real() / n) + x[k].imag() * (fadj[k].imag() / n);
    CHECK(dot_re(ifx, g) == doctest::Approx(rhs).epsilon(1e-10));
  }
}

namespace {

// finite-difference check of d(loss)/d(every parameter) for a given loss builder
void check_param_gradients(const FnoConfig& cfg, const Tensor& encoded, const Tensor& target,
                           double lambda, const FundamentalDiagram& fd, const GridSpec& grid,
                           double tol) {
  FnoParams params = init_params(cfg, 2024);
  // operating point inside the smooth region of the flux law; differences
  // across the clamp/min kinks would invalidate the central FD stencil
  params.proj2_bias[0] = 0.35;

  auto loss_of = [&](const FnoParams& p) {
    Tape tape;
    TapeBindings ids = build_forward(tape, encoded, p, cfg);
    int loss = tape.l2norm(tape.sub_const(ids.output, target));
    if (lambda > 0.0) {
      const int phys = tape.l2norm(
          tape.conservation_residual(tape.scale(ids.output, fd.u_max()), fd, grid));
      loss = tape.add(loss, tape.scale(phys, lambda));
    }
    return tape.scalar_value(loss);
  };

  FnoParams grads = zeros_like(params);
  {
    Tape tape;
    TapeBindings ids = build_forward(tape, encoded, params, cfg);
    int loss = tape.l2norm(tape.sub_const(ids.output, target));
    if (lambda > 0.0) {
      const int phys = tape.l2norm(
          tape.conservation_residual(tape.scale(ids.output, fd.u_max()), fd, grid));
      loss = tape.add(loss, tape.scale(phys, lambda));
    }
    tape.backward(loss);
    add_param_grads(tape, ids, grads);
  }

  const double h = 1e-5;
  auto pv = param_views(params);
  auto gv = param_views(grads);
  double worst = 0.0;
  for (std::size_t t = 0; t < pv.size(); ++t) {
    for (std::size_t k = 0; k < pv[t].size; ++k) {
      const double save = pv[t].data[k];
      pv[t].data[k] = save + h;
      const double up = loss_of(params);
      pv[t].data[k] = save - h;
      const double dn = loss_of(params);
      pv[t].data[k] = save;
      const double fd_grad = (up - dn) / (2.0 * h);
      const double rel = std::abs(gv[t].data[k] - fd_grad) /
                         std::max({std::abs(gv[t].data[k]), std::abs(fd_grad), 1e-6});
      worst = std::max(worst, rel);
    }
  }
  CHECK(worst < tol);
}

}  // namespace

TEST_CASE("full-model gradients match central differences") {
  FundamentalDiagram fd(120.0, 60.0);
  GridSpec grid = GridSpec::make(4, 8, 100.0, 5.0, fd);
  FnoConfig cfg;
  cfg.n_layers = 2;
  cfg.width = 2;
  cfg.modes_x = 2;
  cfg.modes_t = 3;
  cfg.proj_hidden = 3;
  cfg.in_channels = 4;
  cfg.grid = grid;

  Tensor encoded = random_tensor({4, 4, 8}, 5, 0.0, 1.0);
  Tensor target = random_tensor({1, 4, 8}, 6, 0.1, 0.9);

  SUBCASE("data term only") { check_param_gradients(cfg, encoded, target, 0.0, fd, grid, 1e-4); }
  SUBCASE("data plus conservation term") {
    check_param_gradients(cfg, encoded, target, 0.5, fd, grid, 1e-4);
  }
}

TEST_CASE("conservation residual: value oracle and input gradient") {
  FundamentalDiagram fd(120.0, 60.0);
  GridSpec grid = GridSpec::make(8, 6, 100.0, 5.0, fd);

  Tensor field = random_tensor({8, 6}, 7, 5.0, 115.0);

  // value matches the brute-force oracle
  Tensor res = conservation_residual(field, fd, grid);
  Tensor oracle = ref::conservation_residual(field, fd, grid);
  REQUIRE(res.size() == oracle.size());
  for (std::size_t k = 0; k < res.size(); ++k)
    CHECK(res[k] == doctest::Approx(oracle[k]).epsilon(1e-12));

  // residual of a solver output is zero
  Scenario sc = make_scenario(1, 0, ScenarioKind::forward, 3, grid, fd);
  DensityField f = simulate(sc, fd, grid);
  Tensor solved({grid.nx, grid.nt}, f.values);
  Tensor zero_res = conservation_residual(solved, fd, grid);
  for (std::size_t k = 0; k < zero_res.size(); ++k) CHECK(std::abs(zero_res[k]) < 1e-12);

  // constant field: all interface fluxes equal, residual zero
  Tensor constant = Tensor::full({8, 6}, 77.0);
  Tensor const_res = conservation_residual(constant, fd, grid);
  for (std::size_t k = 0; k < const_res.size(); ++k) CHECK(const_res[k] == 0.0);

  // gradient through clamp and min branches vs finite differences
  auto loss_of = [&](const Tensor& fld) {
    Tape tape;
    return tape.scalar_value(tape.l2norm(tape.conservation_residual(tape.leaf(fld), fd, grid)));
  };
  Tape tape;
  const int fi = tape.leaf(field);
  tape.backward(tape.l2norm(tape.conservation_residual(fi, fd, grid)));
  const Tensor& grad = tape.grad(fi);
  const double h = 1e-6;
  for (std::size_t k = 0; k < field.size(); ++k) {
    Tensor up = field, dn = field;
    up[k] += h;
    dn[k] -= h;
    const double fd_grad = (loss_of(up) - loss_of(dn)) / (2.0 * h);
    CHECK(grad[k] == doctest::Approx(fd_grad).epsilon(5e-4).scale(1.0));
  }

  // values pushed outside [0, u_max] contribute no flux gradient
  Tensor clamped_field = field;
  clamped_field[2 * 6 + 2] = 150.0;  // above u_max
  Tape tape2;
  const int fi2 = tape2.leaf(clamped_field);
  tape2.backward(tape2.l2norm(tape2.conservation_residual(fi2, fd, grid)));
  const double g_direct = tape2.grad(fi2)[2 * 6 + 2];
  // only the direct u(t)/u(t+dt) terms survive; compare against FD
  Tensor up = clamped_field, dn = clamped_field;
  up[2 * 6 + 2] += h;
  dn[2 * 6 + 2] -= h;
  const double fd_grad = (loss_of(up) - loss_of(dn)) / (2.0 * h);
  CHECK(g_direct == doctest::Approx(fd_grad).epsilon(1e-5));
}

TEST_CASE("stepped field has strictly positive residual matching the oracle") {
  FundamentalDiagram fd(120.0, 60.0);
  GridSpec grid = GridSpec::make(10, 5, 100.0, 5.0, fd);
  // constant in time, stepped in space: fluxes differ across the step
  Tensor field({10, 5});
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 5; ++j) field[i * 5 + j] = i < 5 ? 30.0 : 100.0;
  Tensor res = conservation_residual(field, fd, grid);
  double norm = 0.0;
  for (std::size_t k = 0; k < res.size(); ++k) norm += res[k] * res[k];
  CHECK(std::sqrt(norm) > 1e-3);
  Tensor oracle = ref::conservation_residual(field, fd, grid);
  for (std::size_t k = 0; k < res.size(); ++k)
    CHECK(res[k] == doctest::Approx(oracle[k]).epsilon(1e-12));
}
