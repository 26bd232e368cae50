#pragma once

#include <vector>

#include "seaice/tensor.hpp"

namespace seaice {

struct PhysicsParams {
  double rho_ice = 900.0;     // kg/m^3
  double rho_a = 1.3;         // kg/m^3
  double rho_o = 1026.0;      // kg/m^3
  double C_a = 1.2e-3;
  double C_o = 5.5e-3;
  double P_star = 27.5;       // N/m^2
  double C_conc = 20.0;
  double e_ellipse = 2.0;
  double f_c = 0.0;           // 1/s
  double delta_min = 2e-9;    // 1/s

  /// Throws std::invalid_argument on non-physical values.
  void validate() const;

  bool operator==(const PhysicsParams&) const = default;
};

/// Speeds below this are treated as zero relative ice/ocean motion when
/// differentiating the quadratic drag.
inline constexpr double kDragEpsilon = 1e-12;

/// Symmetric part of a velocity gradient.
SymTensor2 strain_rate(const Mat2& grad_v);

/// tau = e^-1 dev(eps) + tr(eps)/2 I.
SymTensor2 tau(const SymTensor2& eps, double e_ellipse);

/// sqrt(delta_min^2 + 2 tau:tau).
double delta(const SymTensor2& tau_val, double delta_min);

/// Classic form sqrt(2 e^-2 dev:dev + tr^2 + delta_min^2), written in terms of the
/// strain rate. Agrees with delta(tau(eps)) and is kept for cross-checking.
double delta_from_strain(const SymTensor2& eps, double e_ellipse, double delta_min);

/// P* H exp(-C (1 - A)).
double ice_strength(double thickness, double concentration, const PhysicsParams& params);

struct Viscosities {
  double zeta;
  double eta;
};

/// zeta = P / (2 Delta), eta = zeta / e^2.
Viscosities viscosities(double strength, double delta_val, double e_ellipse);

/// pi = tau / Delta.
SymTensor2 pi_from_velocity(const SymTensor2& tau_val, double delta_val);

/// sqrt(2 pi:pi), the quantity bounded by one for admissible pi.
double pi_magnitude(const SymTensor2& pi);

/// Symmetrized and scaled outer product of tau and pi, acting as
///   X -> [ (pi:X) tau + (tau:X) pi ] / (2 max(1, sqrt(2 pi:pi))).
class ModifiedOuter {
 public:
  ModifiedOuter(const SymTensor2& tau_v, const SymTensor2& pi);

  SymTensor2 apply(const SymTensor2& x) const;
  /// Bilinear form <apply(x), y>.
  double form(const SymTensor2& x, const SymTensor2& y) const;

  const SymTensor2& tau_part() const { return tau_; }
  const SymTensor2& pi_part() const { return pi_; }
  double scale() const { return scale_; }

 private:
  SymTensor2 tau_;
  SymTensor2 pi_;
  double scale_;  // 1 / (2 max(1, sqrt(2 pi:pi)))
};

/// C_o rho_o |v_o - v| (v_o - v).
Vec2 ocean_drag(const Vec2& v, const Vec2& v_ocean, const PhysicsParams& params);

/// Derivative of ocean_drag with respect to v; symmetric negative semidefinite.
Mat2 ocean_drag_derivative(const Vec2& v, const Vec2& v_ocean, const PhysicsParams& params);

/// C_a rho_a |v_a| v_a.
Vec2 atm_drag(const Vec2& v_air, const PhysicsParams& params);

/// sqrt((eps_xx - eps_yy)^2 + 4 eps_xy^2), the usual shear deformation rate.
double shear_deformation(const SymTensor2& eps);

/// One symmetric tensor per quadrature point; index = cell * points_per_cell + q.
struct QuadTensorField {
  std::vector<SymTensor2> values;

  QuadTensorField() = default;
  QuadTensorField(int num_cells, int points_per_cell)
      : values(static_cast<std::size_t>(num_cells) * points_per_cell) {}

  std::size_t size() const { return values.size(); }
  /// max over points of sqrt(2 pi:pi).
  double max_magnitude() const;
};

}  // namespace seaice
