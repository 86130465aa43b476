#include "lwrfno/godunov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lwrfno {

double interface_flux(double u_upstream, double u_downstream, const FundamentalDiagram& fd) {
  return std::min(fd.demand(u_upstream), fd.supply(u_downstream));
}

namespace {

inline double interface_flux_si(double up, double down, const FundamentalDiagram& fd) {
  return std::min(fd.demand_si(up), fd.supply_si(down));
}

// All nx+1 interface fluxes for one row, ghosts per BoundaryMode.
void row_fluxes(std::span<const double> row, double bc_exit, const FundamentalDiagram& fd,
                BoundaryMode mode, std::span<double> q) {
  const int nx = static_cast<int>(row.size());
  if (mode == BoundaryMode::closed) {
    q[0] = 0.0;
    q[nx] = 0.0;
  } else {
    q[0] = interface_flux_si(row[0], row[0], fd);  // upstream ghost replicates cell 0
    q[nx] = interface_flux_si(row[nx - 1], bc_exit, fd);
  }
  for (int i = 1; i < nx; ++i) q[i] = interface_flux_si(row[i - 1], row[i], fd);
}

void update_row(std::span<const double> row, std::span<const double> q, double coef,
                double u_max, std::span<double> out) {
  const int nx = static_cast<int>(row.size());
  for (int i = 0; i < nx; ++i) {
    double u = row[i] + coef * (q[i] - q[i + 1]);
    // A CFL-satisfying monotone update cannot leave [0, u_max]; anything
    // beyond last-bit rounding is a bug, not a state to repair.
    if (u < -1e-9 * u_max || u > u_max * (1.0 + 1e-9))
      throw std::logic_error("godunov: update left [0, u_max], CFL/flux bug");
    out[i] = std::clamp(u, 0.0, u_max);
  }
}

void check_row(std::span<const double> row, double bc_exit, const FundamentalDiagram& fd) {
  for (double u : row) {
    if (!std::isfinite(u)) throw std::domain_error("godunov: non-finite density in row");
    fd.require_density(u);
  }
  if (!std::isfinite(bc_exit)) throw std::domain_error("godunov: non-finite exit density");
  fd.require_density(bc_exit);
}

}  // namespace

std::vector<double> step(std::span<const double> row, double bc_exit,
                         const FundamentalDiagram& fd, const GridSpec& grid,
                         BoundaryMode mode) {
  if (static_cast<int>(row.size()) != grid.nx)
    throw std::invalid_argument("godunov::step: row length != nx");
  grid.require_cfl(fd);
  check_row(row, bc_exit, fd);

  std::vector<double> q(row.size() + 1), out(row.size());
  row_fluxes(row, bc_exit, fd, mode, q);
  update_row(row, q, grid.dt_s / grid.dx_m, fd.u_max(), out);
  return out;
}

DensityField simulate(const Scenario& scenario, const FundamentalDiagram& fd,
                      const GridSpec& grid, BoundaryMode mode) {
  if (static_cast<int>(scenario.ic.size()) != grid.nx)
    throw std::invalid_argument("godunov::simulate: ic length != nx");
  if (static_cast<int>(scenario.bc.size()) != grid.nt)
    throw std::invalid_argument("godunov::simulate: bc length != nt");
  grid.require_cfl(fd);

  DensityField field(grid);
  const int nx = grid.nx, nt = grid.nt;
  std::vector<double> cur(scenario.ic.begin(), scenario.ic.end());
  std::vector<double> next(nx), q(nx + 1);
  check_row(cur, scenario.bc[0], fd);
  for (int i = 0; i < nx; ++i) field.at(i, 0) = cur[i];

  const double coef = grid.dt_s / grid.dx_m;
  for (int j = 0; j + 1 < nt; ++j) {
    const double bc = scenario.bc[j];
    if (!std::isfinite(bc)) throw std::domain_error("godunov: non-finite exit density");
    fd.require_density(bc);
    row_fluxes(cur, bc, fd, mode, q);
    update_row(cur, q, coef, fd.u_max(), next);
    for (int i = 0; i < nx; ++i) field.at(i, j + 1) = next[i];
    cur.swap(next);
  }
  return field;
}

std::vector<CellIndex> vehicle_trajectory(const DensityField& field, double start_x_m,
                                          double start_t_s, const FundamentalDiagram& fd) {
  const GridSpec& g = field.grid;
  if (!(start_x_m >= 0.0 && start_x_m < g.x_len_m()) ||
      !(start_t_s >= 0.0 && start_t_s < g.t_len_s()))
    throw std::domain_error("vehicle_trajectory: start outside the domain");

  // Bilinear density sample at (x meters, column time j*dt), cell centers at
  // (i + 1/2) dx, edge-clamped.
  auto sample = [&](double x, double tj) {
    double fx = std::clamp(x / g.dx_m - 0.5, 0.0, static_cast<double>(g.nx - 1));
    double ft = std::clamp(tj / g.dt_s, 0.0, static_cast<double>(g.nt - 1));
    int i0 = static_cast<int>(fx), j0 = static_cast<int>(ft);
    int i1 = std::min(i0 + 1, g.nx - 1), j1 = std::min(j0 + 1, g.nt - 1);
    double ax = fx - i0, at = ft - j0;
    return (1 - ax) * ((1 - at) * field.at(i0, j0) + at * field.at(i0, j1)) +
           ax * ((1 - at) * field.at(i1, j0) + at * field.at(i1, j1));
  };

  std::vector<CellIndex> cells;
  double x = start_x_m;
  double t = start_t_s;
  while (t < g.t_len_s() && x < g.x_len_m()) {
    int i = std::clamp(static_cast<int>(x / g.dx_m), 0, g.nx - 1);
    int j = std::clamp(static_cast<int>(t / g.dt_s + 0.5), 0, g.nt - 1);
    if (cells.empty() || cells.back() != CellIndex{i, j}) cells.push_back({i, j});
    double u = std::clamp(sample(x, t), 0.0, fd.u_max());
    x += fd.v_max_mps() * (1.0 - u / fd.u_max()) * g.dt_s;
    t += g.dt_s;
  }
  return cells;
}

}  // namespace lwrfno
