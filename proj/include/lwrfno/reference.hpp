#pragma once

#include <vector>

#include "lwrfno/density_field.hpp"
#include "lwrfno/fno.hpp"
#include "lwrfno/tensor.hpp"

// Serial reference implementations: straight-line, loop-by-definition code
// that shares no kernels with the production path. They serve as the
// independent oracles in the test suites and as the baseline side of the
// benchmark target. Everything here is O(simple) and single-threaded.
namespace lwrfno::ref {

/// O(n^2) DFT by definition.
std::vector<cplx> dft_1d(const std::vector<cplx>& x, bool inverse);

/// Naive 2-D DFT over the last two axes (unnormalized forward; inverse
/// carries 1/(nx*nt)).
CTensor dft2(const CTensor& x, bool inverse);

/// Triple-loop channel mixing.
Tensor pointwise_linear(const Tensor& x, const Tensor& w, const Tensor& b);

/// By-definition spectral truncation/mixing with the same mode layout.
CTensor spectral_multiply(const CTensor& x, const CTensor& r);

/// Straight-line re-implementation of the whole operator network built on
/// the naive DFT; dual route for the forward-pass oracle.
Tensor fno_forward(const Tensor& encoded, const FnoParams& params, const FnoConfig& config);

/// Independent Godunov march with the flux law written out inline.
DensityField simulate_lwr(const std::vector<double>& ic, const std::vector<double>& bc,
                          const FundamentalDiagram& fd, const GridSpec& grid,
                          bool closed_boundaries = false);

/// Brute-force conservation residual (veh/km / u_max), shape (nx-2, nt-1).
Tensor conservation_residual(const Tensor& field, const FundamentalDiagram& fd,
                             const GridSpec& grid);

}  // namespace lwrfno::ref
