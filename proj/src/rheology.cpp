#include "seaice/rheology.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seaice {

void PhysicsParams::validate() const {
  if (!(rho_ice > 0 && rho_a > 0 && rho_o > 0)) throw std::invalid_argument("densities must be positive");
  if (!(C_a > 0 && C_o > 0)) throw std::invalid_argument("drag coefficients must be positive");
  if (!(e_ellipse > 0)) throw std::invalid_argument("ellipse ratio must be positive");
  if (!(delta_min > 0)) throw std::invalid_argument("delta_min must be positive");
  if (!(P_star >= 0) || !(C_conc >= 0)) throw std::invalid_argument("ice strength parameters must be non-negative");
  if (!std::isfinite(f_c)) throw std::invalid_argument("Coriolis parameter must be finite");
}

SymTensor2 strain_rate(const Mat2& g) { return {g.xx, 0.5 * (g.xy + g.yx), g.yy}; }

SymTensor2 tau(const SymTensor2& eps, double e_ellipse) {
  const double half_tr = 0.5 * eps.trace();
  const double inv_e = 1.0 / e_ellipse;
  return {inv_e * (eps.xx - half_tr) + half_tr, inv_e * eps.xy, inv_e * (eps.yy - half_tr) + half_tr};
}

double delta(const SymTensor2& t, double delta_min) {
  return std::sqrt(delta_min * delta_min + 2.0 * contract(t, t));
}

double delta_from_strain(const SymTensor2& eps, double e_ellipse, double delta_min) {
  const double tr = eps.trace();
  const SymTensor2 dev{eps.xx - 0.5 * tr, eps.xy, eps.yy - 0.5 * tr};
  return std::sqrt(2.0 / (e_ellipse * e_ellipse) * contract(dev, dev) + tr * tr +
                   delta_min * delta_min);
}

double ice_strength(double thickness, double concentration, const PhysicsParams& p) {
  return p.P_star * thickness * std::exp(-p.C_conc * (1.0 - concentration));
}

Viscosities viscosities(double strength, double delta_val, double e_ellipse) {
  const double zeta = strength / (2.0 * delta_val);
  return {zeta, zeta / (e_ellipse * e_ellipse)};
}

SymTensor2 pi_from_velocity(const SymTensor2& tau_val, double delta_val) {
  return (1.0 / delta_val) * tau_val;
}

double pi_magnitude(const SymTensor2& pi) { return std::sqrt(2.0 * contract(pi, pi)); }

ModifiedOuter::ModifiedOuter(const SymTensor2& tau_v, const SymTensor2& pi)
    : tau_(tau_v), pi_(pi), scale_(0.5 / std::max(1.0, pi_magnitude(pi))) {}

SymTensor2 ModifiedOuter::apply(const SymTensor2& x) const {
  return (scale_ * contract(pi_, x)) * tau_ + (scale_ * contract(tau_, x)) * pi_;
}

double ModifiedOuter::form(const SymTensor2& x, const SymTensor2& y) const {
  return scale_ * (contract(pi_, x) * contract(tau_, y) + contract(tau_, x) * contract(pi_, y));
}

Vec2 ocean_drag(const Vec2& v, const Vec2& v_ocean, const PhysicsParams& p) {
  const Vec2 d = v_ocean - v;
  return (p.C_o * p.rho_o * norm(d)) * d;
}

Mat2 ocean_drag_derivative(const Vec2& v, const Vec2& v_ocean, const PhysicsParams& p) {
  const Vec2 d = v_ocean - v;
  const double s = norm(d);
  const double c = p.C_o * p.rho_o;
  Mat2 m{-c * s, 0.0, 0.0, -c * s};
  if (s >= kDragEpsilon) {
    const double r = c / s;
    m.xx -= r * d.x * d.x;
    m.xy -= r * d.x * d.y;
    m.yx -= r * d.y * d.x;
    m.yy -= r * d.y * d.y;
  }
  return m;
}

Vec2 atm_drag(const Vec2& v_air, const PhysicsParams& p) {
  return (p.C_a * p.rho_a * norm(v_air)) * v_air;
}

double shear_deformation(const SymTensor2& eps) {
  const double d = eps.xx - eps.yy;
  return std::sqrt(d * d + 4.0 * eps.xy * eps.xy);
}

double QuadTensorField::max_magnitude() const {
  double m = 0.0;
  for (const auto& t : values) m = std::max(m, pi_magnitude(t));
  return m;
}

}  // namespace seaice
