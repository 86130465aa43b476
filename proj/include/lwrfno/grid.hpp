#pragma once

#include <stdexcept>
#include <string>

#include "lwrfno/fundamental_diagram.hpp"

namespace lwrfno {

/// Uniform space-time grid. A density field has nx cells of width dx_m
/// meters and nt time columns dt_s seconds apart; column 0 is the initial
/// condition, so a simulation performs nt-1 explicit updates.
struct GridSpec {
  int nx = 0;
  int nt = 0;
  double dx_m = 0.0;
  double dt_s = 0.0;

  double x_len_m() const { return nx * dx_m; }
  double t_len_s() const { return nt * dt_s; }

  /// CFL number v_max * dt / dx; must be <= 1 for the explicit scheme.
  double cfl_number(const FundamentalDiagram& fd) const {
    return fd.v_max_mps() * dt_s / dx_m;
  }

  /// Validating factory. Throws std::invalid_argument naming the violated
  /// constraint. The CFL check carries a 1e-12 relative slack so that grids
  /// sitting exactly on the stability boundary survive rounding.
  static GridSpec make(int nx, int nt, double dx_m, double dt_s,
                       const FundamentalDiagram& fd) {
    if (nx < 1 || nt < 2)
      throw std::invalid_argument("GridSpec: need nx >= 1 and nt >= 2");
    if (!(dx_m > 0.0) || !(dt_s > 0.0))
      throw std::invalid_argument("GridSpec: dx and dt must be > 0");
    GridSpec g{nx, nt, dx_m, dt_s};
    g.require_cfl(fd);
    return g;
  }

  void require_cfl(const FundamentalDiagram& fd) const {
    if (fd.v_max_mps() * dt_s > dx_m * (1.0 + 1e-12))
      throw std::invalid_argument(
          "GridSpec: CFL violated, v_max*dt = " + std::to_string(fd.v_max_mps() * dt_s) +
          " m exceeds dx = " + std::to_string(dx_m) + " m");
  }
};

}  // namespace lwrfno
