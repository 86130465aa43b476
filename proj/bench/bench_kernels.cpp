// Timing comparison of the OpenMP production kernels against the serial
// reference implementations that back the test oracles. Build and run:
//   ./bench/lwrfno-bench [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lwrfno/fft.hpp"
#include "lwrfno/fno.hpp"
#include "lwrfno/godunov.hpp"
#include "lwrfno/io.hpp"
#include "lwrfno/kernels.hpp"
#include "lwrfno/reference.hpp"
#include "lwrfno/rng.hpp"

using namespace lwrfno;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

template <typename F>
double time_best_of(int repeats, F&& fn) {
  double best = 1e30;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = clock_type::now();
    fn();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

void report(const char* name, double prod_s, double ref_s) {
  std::printf("%-28s %10.3f ms %14.3f ms %8.1fx\n", name, prod_s * 1e3, ref_s * 1e3,
              ref_s / prod_s);
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 5;

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (no OpenMP)\n");
#endif
  std::printf("%-28s %13s %17s %9s\n", "kernel", "parallel", "serial ref", "speedup");

  RunConfig cfg = desk_preset();
  const int width = cfg.fno.width;
  const GridSpec grid = cfg.grid;
  SplitMix64 rng(2024);

  // fft2 on a (width, nx, nt) latent block
  {
    CTensor x({width, grid.nx, grid.nt});
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = cplx{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double prod = time_best_of(repeats, [&] { volatile auto y = fft::fft2(x); });
    const double ref = time_best_of(repeats, [&] { volatile auto y = ref::dft2(x, false); });
    report("fft2 (w,32,120)", prod, ref);
  }

  // pointwise channel mixing
  {
    Tensor x({width, grid.nx, grid.nt});
    Tensor w({width, width}), b({width});
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = rng.uniform(-1, 1);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = rng.uniform(-1, 1);
    const double prod =
        time_best_of(repeats, [&] { volatile auto y = pointwise_linear(x, w, b); });
    const double ref =
        time_best_of(repeats, [&] { volatile auto y = ref::pointwise_linear(x, w, b); });
    report("pointwise_linear", prod, ref);
  }

  // spectral mixing on retained modes
  {
    CTensor x({width, grid.nx, grid.nt});
    CTensor r({width, width, cfg.fno.modes_x, cfg.fno.modes_t});
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = cplx{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = cplx{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double prod =
        time_best_of(repeats, [&] { volatile auto y = spectral_multiply(x, r); });
    const double ref =
        time_best_of(repeats, [&] { volatile auto y = ref::spectral_multiply(x, r); });
    report("spectral_multiply", prod, ref);
  }

  // whole spectral layer path, fused truncation-aware kernel vs naive chain
  {
    Tensor z({width, grid.nx, grid.nt});
    CTensor r({width, width, cfg.fno.modes_x, cfg.fno.modes_t});
    for (std::size_t k = 0; k < z.size(); ++k) z[k] = rng.uniform(-1, 1);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = cplx{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double prod = time_best_of(repeats, [&] { volatile auto y = spectral_conv(z, r); });
    const double ref = time_best_of(repeats, [&] {
      volatile auto y =
          take_real(ref::dft2(ref::spectral_multiply(ref::dft2(to_complex(z), false), r), true));
    });
    report("spectral_conv path", prod, ref);
  }

  // whole forward pass vs the straight-line reimplementation
  {
    FnoParams params = init_params(cfg.fno, 7);
    Scenario sc = make_scenario(2, 1, ScenarioKind::forward, 11, grid, cfg.fd);
    Tensor encoded = encode_input(sc, grid, cfg.fd);
    const double prod = time_best_of(
        repeats, [&] { volatile auto y = predict_normalized(encoded, params, cfg.fno); });
    const double ref = time_best_of(
        repeats, [&] { volatile auto y = ref::fno_forward(encoded, params, cfg.fno); });
    report("operator forward", prod, ref);
  }

  // Godunov batch: 64 scenarios, production parallel fan-out vs serial loop
  {
    std::vector<Scenario> scenarios;
    for (int s = 0; s < 64; ++s)
      scenarios.push_back(make_scenario(s % 4, s % 3, ScenarioKind::forward, 100 + s, grid, cfg.fd));
    const double prod = time_best_of(repeats, [&] {
#pragma omp parallel for schedule(dynamic)
      for (std::int64_t s = 0; s < 64; ++s) {
        volatile auto f = simulate(scenarios[s], cfg.fd, grid);
      }
    });
    const double ref = time_best_of(repeats, [&] {
      for (std::int64_t s = 0; s < 64; ++s) {
        volatile auto f = ref::simulate_lwr(scenarios[s].ic, scenarios[s].bc, cfg.fd, grid);
      }
    });
    report("godunov batch x64", prod, ref);
  }

  return 0;
}
