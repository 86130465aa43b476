#pragma once

#include <span>
#include <vector>

#include "lwrfno/density_field.hpp"
#include "lwrfno/fundamental_diagram.hpp"
#include "lwrfno/grid.hpp"
#include "lwrfno/scenario.hpp"

namespace lwrfno {

/// Boundary treatment for the explicit update. `open` replicates cell 0 into
/// the upstream ghost (free inflow of the ambient demand) and puts the
/// prescribed exit density into the downstream ghost; `closed` forces both
/// boundary fluxes to zero, which makes total mass exactly conserved and is
/// used by the conservation tests.
enum class BoundaryMode { open, closed };

/// Godunov interface flux min(demand(upstream), supply(downstream)), veh/hr.
double interface_flux(double u_upstream, double u_downstream, const FundamentalDiagram& fd);

/// One conservative update of a density row. `bc_exit` is the downstream
/// ghost density (u_max = red light, 0 = green). Throws on CFL violation or
/// non-finite input; the output provably stays in [0, u_max], asserted with
/// a 1e-9 slack for rounding and then snapped to the exact bounds.
std::vector<double> step(std::span<const double> row, double bc_exit,
                         const FundamentalDiagram& fd, const GridSpec& grid,
                         BoundaryMode mode = BoundaryMode::open);

/// Run the scheme for all nt-1 steps. Column 0 of the result is scenario.ic;
/// step j -> j+1 uses scenario.bc[j] as the exit ghost density.
DensityField simulate(const Scenario& scenario, const FundamentalDiagram& fd,
                      const GridSpec& grid, BoundaryMode mode = BoundaryMode::open);

struct CellIndex {
  int i = 0;
  int j = 0;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Probe-vehicle path through a solved field: forward Euler on
/// dx/dt = v_max (1 - u/u_max) at the grid dt, bilinear density sampling,
/// terminated at the domain exit. Returns the visited cells in time order.
std::vector<CellIndex> vehicle_trajectory(const DensityField& field, double start_x_m,
                                          double start_t_s, const FundamentalDiagram& fd);

}  // namespace lwrfno
