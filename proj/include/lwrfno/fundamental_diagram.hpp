#pragma once

#include <stdexcept>
#include <string>

namespace lwrfno {

/// Greenshields fundamental relation for road traffic,
///
///   q = f(u) = u * v_max * (1 - u / u_max),
///
/// a concave quadratic with critical density u_cr = u_max/2 and capacity
/// q_max = f(u_cr) = u_max * v_max / 4. Densities are stored in veh/km.
/// Two unit systems are exposed: the `*_vph` family uses v_max in km/h and
/// returns veh/hr (the reporting convention), the `*_si` family uses v_max
/// in m/s so that a finite-volume update u += (dt/dx) * (q_in - q_out) with
/// dt in seconds and dx in meters needs no extra conversion factor.
class FundamentalDiagram {
 public:
  FundamentalDiagram(double u_max_veh_km, double v_max_km_h)
      : u_max_(u_max_veh_km), v_kmh_(v_max_km_h) {
    if (!(u_max_ > 0.0)) throw std::invalid_argument("FundamentalDiagram: u_max must be > 0");
    if (!(v_kmh_ > 0.0)) throw std::invalid_argument("FundamentalDiagram: v_max must be > 0");
    v_mps_ = v_kmh_ / 3.6;
    u_cr_ = u_max_ / 2.0;
    q_max_vph_ = u_max_ * v_kmh_ / 4.0;
    q_max_si_ = u_max_ * v_mps_ / 4.0;
  }

  /// Construct from road capacity instead of free-flow speed:
  /// v_max = 4 * q_max / u_max.
  static FundamentalDiagram from_capacity(double u_max_veh_km, double q_max_veh_h) {
    if (!(u_max_veh_km > 0.0))
      throw std::invalid_argument("FundamentalDiagram: u_max must be > 0");
    if (!(q_max_veh_h > 0.0))
      throw std::invalid_argument("FundamentalDiagram: q_max must be > 0");
    return FundamentalDiagram(u_max_veh_km, 4.0 * q_max_veh_h / u_max_veh_km);
  }

  double u_max() const { return u_max_; }
  double v_max_kmh() const { return v_kmh_; }
  double v_max_mps() const { return v_mps_; }
  double u_critical() const { return u_cr_; }
  double q_max_vph() const { return q_max_vph_; }
  double q_max_si() const { return q_max_si_; }

  void require_density(double u) const {
    if (!(u >= 0.0 && u <= u_max_))
      throw std::domain_error("density " + std::to_string(u) + " outside [0, " +
                              std::to_string(u_max_) + "] veh/km");
  }

  // --- veh/hr flux law and Godunov sending/receiving capacities ---

  double flux(double u) const {
    require_density(u);
    return u * v_kmh_ * (1.0 - u / u_max_);
  }

  /// Sending capacity: f(u) below critical density, q_max above.
  double demand(double u) const {
    require_density(u);
    return u <= u_cr_ ? u * v_kmh_ * (1.0 - u / u_max_) : q_max_vph_;
  }

  /// Receiving capacity: q_max below critical density, f(u) above.
  double supply(double u) const {
    require_density(u);
    return u > u_cr_ ? u * v_kmh_ * (1.0 - u / u_max_) : q_max_vph_;
  }

  // --- solver-internal variants, v in m/s, no range checks ---
  // Callers guarantee u in [0, u_max] (the solver clamps before evaluating).

  double flux_si(double u) const { return u * v_mps_ * (1.0 - u / u_max_); }

  double demand_si(double u) const {
    return u <= u_cr_ ? u * v_mps_ * (1.0 - u / u_max_) : q_max_si_;
  }

  double supply_si(double u) const {
    return u > u_cr_ ? u * v_mps_ * (1.0 - u / u_max_) : q_max_si_;
  }

  double flux_slope_si(double u) const { return v_mps_ * (1.0 - 2.0 * u / u_max_); }

  /// One-sided slopes used by the differentiable conservation residual.
  /// At u == u_cr the demand keeps its f'(u) branch (which is 0 there);
  /// the capped branches have slope 0.
  double demand_slope_si(double u) const { return u <= u_cr_ ? flux_slope_si(u) : 0.0; }

  double supply_slope_si(double u) const { return u > u_cr_ ? flux_slope_si(u) : 0.0; }

 private:
  double u_max_;
  double v_kmh_;
  double v_mps_;
  double u_cr_;
  double q_max_vph_;
  double q_max_si_;
};

}  // namespace lwrfno
