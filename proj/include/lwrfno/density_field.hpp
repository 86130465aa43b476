#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lwrfno/fundamental_diagram.hpp"
#include "lwrfno/grid.hpp"

namespace lwrfno {

/// Discretized density u(x, t) on a GridSpec, row-major (nx, nt):
/// entry (i, j) is cell i at time j*dt, stored at values[i*nt + j].
struct DensityField {
  GridSpec grid;
  std::vector<double> values;

  DensityField() = default;
  explicit DensityField(const GridSpec& g)
      : grid(g), values(static_cast<std::size_t>(g.nx) * g.nt, 0.0) {}

  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.nt + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.nt + j]; }

  /// Total vehicle count at time column j: sum_i u(i,j) * dx (veh, with dx in km).
  double total_mass(int j) const {
    double m = 0.0;
    for (int i = 0; i < grid.nx; ++i) m += at(i, j);
    return m * grid.dx_m / 1000.0;
  }

  void validate(const FundamentalDiagram& fd) const {
    for (double v : values) {
      if (!std::isfinite(v)) throw std::domain_error("DensityField: non-finite value");
      if (v < 0.0 || v > fd.u_max())
        throw std::domain_error("DensityField: value outside [0, u_max]");
    }
  }
};

}  // namespace lwrfno
