#include "seaice/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seaice {

void MomentumState::update_strength() {
  P = CellScalarField(*grid);
  for (int c = 0; c < grid->num_cells(); ++c) P[c] = ice_strength(H[c], A[c], params);
}

void MomentumState::validate() const {
  if (grid == nullptr) throw std::invalid_argument("momentum state without grid");
  params.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  A.check_range(*grid, 0.0, 1.0, "concentration A");
  H.check_range(*grid, 0.0, INFINITY, "thickness H");
  P.check(*grid);
  v_prev.check(*grid);
  v.check(*grid);
  if (pi.size() != static_cast<std::size_t>(grid->num_cells()) * kQuadPerCell) {
    throw std::invalid_argument("pi field does not match the grid");
  }
  if (!forcing) throw std::invalid_argument("momentum state without forcing");
}

MomentumState make_momentum_state(const StructuredGrid& grid, const PhysicsParams& params, double dt,
                                  double t, CellScalarField A, CellScalarField H,
                                  NodalVectorField v_prev, ForcingFn forcing) {
  MomentumState s;
  s.grid = &grid;
  s.params = params;
  s.dt = dt;
  s.t = t;
  s.A = std::move(A);
  s.H = std::move(H);
  s.v_prev = std::move(v_prev);
  s.v = s.v_prev;
  s.forcing = std::move(forcing);
  s.update_strength();
  s.pi = QuadTensorField(grid.num_cells(), kQuadPerCell);
  s.validate();
  s.pi = MomentumAssembler(s).pi_from(s.v);
  return s;
}

CsrMatrix velocity_pattern(const StructuredGrid& grid) {
  const int nn1 = grid.nx() + 1;
  const int ndofs = grid.num_dofs();
  std::vector<std::size_t> off(ndofs + 1, 0);
  std::vector<int> col;
  col.reserve(static_cast<std::size_t>(ndofs) * 18);
  for (int node = 0; node < grid.num_nodes(); ++node) {
    const int i = node % nn1;
    const int j = node / nn1;
    for (int comp = 0; comp < 2; ++comp) {
      const int row = StructuredGrid::dof(node, comp);
      if (grid.is_boundary_node(node)) {
        col.push_back(row);
      } else {
        for (int dj = -1; dj <= 1; ++dj) {
          for (int di = -1; di <= 1; ++di) {
            const int m = grid.node_index(i + di, j + dj);
            if (grid.is_boundary_node(m)) continue;
            col.push_back(StructuredGrid::dof(m, 0));
            col.push_back(StructuredGrid::dof(m, 1));
          }
        }
      }
      off[row + 1] = col.size();
    }
  }
  std::vector<double> val(col.size(), 0.0);
  return CsrMatrix(ndofs, ndofs, std::move(off), std::move(col), std::move(val));
}

MomentumAssembler::MomentumAssembler(const MomentumState& state,
                                     std::shared_ptr<const CsrMatrix> pattern)
    : grid_(*state.grid),
      params_(state.params),
      dt_(state.dt),
      quad_(make_quad_points(*state.grid)),
      pattern_(std::move(pattern)) {
  state.validate();
  const int ncells = grid_.num_cells();
  mass_coeff_.resize(ncells);
  strength_.resize(ncells);
  for (int c = 0; c < ncells; ++c) {
    mass_coeff_[c] = params_.rho_ice * state.H[c];
    strength_[c] = state.P[c];
  }

  for (int q = 0; q < kQuadPerCell; ++q) {
    for (int k = 0; k < 4; ++k) {
      const Vec2 g = quad_.shape[q].gradients[k];
      const SymTensor2 eps_x{g.x, 0.5 * g.y, 0.0};
      const SymTensor2 eps_y{0.0, 0.5 * g.x, g.y};
      basis_tau_[q][2 * k] = tau(eps_x, params_.e_ellipse);
      basis_tau_[q][2 * k + 1] = tau(eps_y, params_.e_ellipse);
      basis_trace_[q][2 * k] = g.x;
      basis_trace_[q][2 * k + 1] = g.y;
    }
    for (int a = 0; a < 8; ++a) {
      for (int b = 0; b < 8; ++b) tau_products_[q][a][b] = contract(basis_tau_[q][a], basis_tau_[q][b]);
    }
  }

  points_.resize(static_cast<std::size_t>(ncells) * kQuadPerCell);
  load_.assign(grid_.num_dofs(), 0.0);
  const auto& vprev = state.v_prev.values();
  for (int c = 0; c < ncells; ++c) {
    const auto nodes = grid_.cell_nodes(c);
    const double rho_h = mass_coeff_[c];
    for (int q = 0; q < kQuadPerCell; ++q) {
      PointData& pd = points_[static_cast<std::size_t>(c) * kQuadPerCell + q];
      const ForcingSample f = state.forcing(state.t, quad_.physical_point(grid_, c, q));
      const Vec2 vn = value_at(vprev, c, q);
      const Vec2 rel = vn - f.ocean;
      const Vec2 coriolis = (rho_h * params_.f_c) * Vec2{-rel.y, rel.x};
      pd.weight = quad_.weights[q];
      pd.ocean = f.ocean;
      pd.load = rho_h * vn - dt_ * coriolis + dt_ * atm_drag(f.wind, params_);
      for (int k = 0; k < 4; ++k) {
        const double wn = pd.weight * quad_.shape[q].values[k];
        load_[2 * nodes[k]] += wn * pd.load.x;
        load_[2 * nodes[k] + 1] += wn * pd.load.y;
      }
    }
  }
  zero_boundary(load_, grid_);
}

Vec2 MomentumAssembler::value_at(std::span<const double> v, int cell, int q) const {
  const auto nodes = grid_.cell_nodes(cell);
  Vec2 r;
  for (int k = 0; k < 4; ++k) {
    const double n = quad_.shape[q].values[k];
    r.x += n * v[2 * nodes[k]];
    r.y += n * v[2 * nodes[k] + 1];
  }
  return r;
}

SymTensor2 MomentumAssembler::tau_at(const NodalVectorField& v, int cell, int q) const {
  const auto nodes = grid_.cell_nodes(cell);
  const auto& vals = v.values();
  SymTensor2 t;
  for (int k = 0; k < 4; ++k) {
    t += vals[2 * nodes[k]] * basis_tau_[q][2 * k];
    t += vals[2 * nodes[k] + 1] * basis_tau_[q][2 * k + 1];
  }
  return t;
}

void MomentumAssembler::add_operator_cells(const NodalVectorField& v, int first, int last,
                                           std::span<double> out) const {
  const auto& vals = v.values();
  const double dmin = params_.delta_min;
  for (int c = first; c < last; ++c) {
    const auto nodes = grid_.cell_nodes(c);
    const double rho_h = mass_coeff_[c];
    const double p = strength_[c];
    std::array<double, 8> local{};
    for (int q = 0; q < kQuadPerCell; ++q) {
      const PointData& pd = points_[static_cast<std::size_t>(c) * kQuadPerCell + q];
      const Vec2 vq = value_at(vals, c, q);
      const SymTensor2 t = tau_at(v, c, q);
      const double dl = delta(t, dmin);
      const Vec2 drag = ocean_drag(vq, pd.ocean, params_);
      // Integrand of A(v, phi) = rho H v.phi + dt[(P/Delta) tau(v):tau(phi) - P/2 tr eps(phi)] - dt tau_o.phi
      const Vec2 mass_drag = rho_h * vq - dt_ * drag;
      const double visc = dt_ * p / dl;
      const double press = 0.5 * dt_ * p;
      for (int k = 0; k < 4; ++k) {
        const double n = quad_.shape[q].values[k];
        for (int a = 0; a < 2; ++a) {
          const int i = 2 * k + a;
          const double point_term = (a == 0 ? mass_drag.x : mass_drag.y) * n;
          local[i] += pd.weight * (point_term + visc * contract(t, basis_tau_[q][i]) -
                                   press * basis_trace_[q][i]);
        }
      }
    }
    for (int k = 0; k < 4; ++k) {
      out[2 * nodes[k]] -= local[2 * k];
      out[2 * nodes[k] + 1] -= local[2 * k + 1];
    }
  }
}

std::vector<double> MomentumAssembler::residual(const NodalVectorField& v) const {
  v.check(grid_);
  std::vector<double> r = load_;
  add_operator_cells(v, 0, grid_.num_cells(), r);
  zero_boundary(r, grid_);
  return r;
}

double MomentumAssembler::energy(const NodalVectorField& v) const {
  v.check(grid_);
  const auto& vals = v.values();
  const double dmin = params_.delta_min;
  const double c_o = params_.C_o * params_.rho_o;
  double total = 0.0;
  for (int c = 0; c < grid_.num_cells(); ++c) {
    const auto nodes = grid_.cell_nodes(c);
    const double rho_h = mass_coeff_[c];
    const double p = strength_[c];
    double cell_sum = 0.0;
    for (int q = 0; q < kQuadPerCell; ++q) {
      const PointData& pd = points_[static_cast<std::size_t>(c) * kQuadPerCell + q];
      const Vec2 vq = value_at(vals, c, q);
      const SymTensor2 t = tau_at(v, c, q);
      double tr = 0.0;
      for (int k = 0; k < 4; ++k) {
        tr += vals[2 * nodes[k]] * basis_trace_[q][2 * k] + vals[2 * nodes[k] + 1] * basis_trace_[q][2 * k + 1];
      }
      const double rel = norm(pd.ocean - vq);
      const double integrand = 0.5 * rho_h * dot(vq, vq) - dot(pd.load, vq) +
                               dt_ * (0.5 * p * (delta(t, dmin) - tr) + c_o * rel * rel * rel / 3.0);
      cell_sum += pd.weight * integrand;
    }
    total += cell_sum;
  }
  return total;
}

double MomentumAssembler::energy_change(const NodalVectorField& v, std::span<const double> step) const {
  v.check(grid_);
  if (step.size() != v.size()) throw std::invalid_argument("energy_change: step size mismatch");
  const auto& vals = v.values();
  const NodalVectorField s(std::vector<double>(step.begin(), step.end()));
  const double dmin = params_.delta_min;
  const double c_o = params_.C_o * params_.rho_o;
  double total = 0.0;
  for (int c = 0; c < grid_.num_cells(); ++c) {
    const auto nodes = grid_.cell_nodes(c);
    const double rho_h = mass_coeff_[c];
    const double p = strength_[c];
    double cell_sum = 0.0;
    for (int q = 0; q < kQuadPerCell; ++q) {
      const PointData& pd = points_[static_cast<std::size_t>(c) * kQuadPerCell + q];
      const Vec2 vq = value_at(vals, c, q);
      const Vec2 sq = value_at(step, c, q);
      const SymTensor2 t0 = tau_at(v, c, q);
      const SymTensor2 ts = tau_at(s, c, q);
      double tr_s = 0.0;
      for (int k = 0; k < 4; ++k) {
        tr_s += step[2 * nodes[k]] * basis_trace_[q][2 * k] + step[2 * nodes[k] + 1] * basis_trace_[q][2 * k + 1];
      }
      const double d0 = delta(t0, dmin);
      const double d1 = delta(t0 + ts, dmin);
      // Delta(v+s) - Delta(v) = 2 (2 tau0 + tau_s):tau_s / (Delta0 + Delta1)
      const double d_delta = 2.0 * contract(2.0 * t0 + ts, ts) / (d0 + d1);
      const Vec2 r0 = pd.ocean - vq;
      const Vec2 r1 = r0 - sq;
      const double n0 = norm(r0);
      const double n1 = norm(r1);
      double d_cube = 0.0;
      if (n0 + n1 > 0.0) {
        const double d_norm = (dot(sq, sq) - 2.0 * dot(r0, sq)) / (n0 + n1);
        d_cube = d_norm * (n1 * n1 + n1 * n0 + n0 * n0);
      }
      const double integrand = rho_h * (dot(vq, sq) + 0.5 * dot(sq, sq)) - dot(pd.load, sq) +
                               dt_ * (0.5 * p * (d_delta - tr_s) + c_o * d_cube / 3.0);
      cell_sum += pd.weight * integrand;
    }
    total += cell_sum;
  }
  return total;
}

CsrMatrix MomentumAssembler::assemble_matrix(const NodalVectorField& v, const QuadTensorField* pi,
                                             Linearization kind) const {
  v.check(grid_);
  CsrMatrix m = pattern_ ? *pattern_ : velocity_pattern(grid_);
  if (m.rows() != grid_.num_dofs()) throw std::invalid_argument("sparsity pattern does not match the grid");
  const auto off = m.offsets();
  const auto col = m.columns();
  auto val = m.values();
  std::fill(val.begin(), val.end(), 0.0);

  const auto& vals = v.values();
  const double dmin = params_.delta_min;
  const auto mask = grid_.boundary_mask();

  for (int c = 0; c < grid_.num_cells(); ++c) {
    const auto nodes = grid_.cell_nodes(c);
    const double rho_h = mass_coeff_[c];
    const double p = strength_[c];
    double local[8][8] = {};
    for (int q = 0; q < kQuadPerCell; ++q) {
      const std::size_t qi = static_cast<std::size_t>(c) * kQuadPerCell + q;
      const PointData& pd = points_[qi];
      const double w = pd.weight;
      const Vec2 vq = value_at(vals, c, q);
      const SymTensor2 t = tau_at(v, c, q);
      const double dl = delta(t, dmin);
      const Mat2 dd = ocean_drag_derivative(vq, pd.ocean, params_);
      const auto& bt = basis_tau_[q];
      const auto& tt = tau_products_[q];
      const auto& shape = quad_.shape[q].values;

      const double visc = w * dt_ * p / dl;
      for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) local[i][j] += visc * tt[i][j];
      }
      // Mass and the (positive semidefinite) negated drag derivative, both
      // coupling N_k e_a with N_l e_b.
      const double mab[2][2] = {{rho_h - dt_ * dd.xx, -dt_ * dd.xy}, {-dt_ * dd.yx, rho_h - dt_ * dd.yy}};
      for (int k = 0; k < 4; ++k) {
        for (int l = 0; l < 4; ++l) {
          const double nn = w * shape[k] * shape[l];
          for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) local[2 * k + a][2 * l + b] += nn * mab[a][b];
          }
        }
      }

      if (kind == Linearization::kPicard) continue;
      std::array<double, 8> ta{};
      for (int i = 0; i < 8; ++i) ta[i] = contract(t, bt[i]);
      if (kind == Linearization::kStandard) {
        const double coef = w * dt_ * 2.0 * p / (dl * dl * dl);
        for (int i = 0; i < 8; ++i) {
          for (int j = 0; j < 8; ++j) local[i][j] -= coef * ta[i] * ta[j];
        }
      } else {
        const ModifiedOuter mo(t, pi->values[qi]);
        std::array<double, 8> pb{};
        for (int i = 0; i < 8; ++i) pb[i] = contract(mo.pi_part(), bt[i]);
        const double coef = w * dt_ * 2.0 * p / (dl * dl) * mo.scale();
        for (int i = 0; i < 8; ++i) {
          for (int j = 0; j < 8; ++j) local[i][j] -= coef * (pb[i] * ta[j] + ta[i] * pb[j]);
        }
      }
    }

    std::array<int, 8> g{};
    for (int k = 0; k < 4; ++k) {
      g[2 * k] = 2 * nodes[k];
      g[2 * k + 1] = 2 * nodes[k] + 1;
    }
    for (int i = 0; i < 8; ++i) {
      if (mask[g[i] / 2]) continue;
      const int* row_begin = col.data() + off[g[i]];
      const int* row_end = col.data() + off[g[i] + 1];
      for (int j = 0; j < 8; ++j) {
        if (mask[g[j] / 2]) continue;
        const int* it = std::lower_bound(row_begin, row_end, g[j]);
        val[static_cast<std::size_t>(it - col.data())] += local[i][j];
      }
    }
  }
  for (int i = 0; i < m.rows(); ++i) {
    if (mask[i / 2]) val[off[i]] = 1.0;  // boundary rows hold only their diagonal
  }
  return m;
}

CsrMatrix MomentumAssembler::jacobian_std(const NodalVectorField& v) const {
  return assemble_matrix(v, nullptr, Linearization::kStandard);
}

CsrMatrix MomentumAssembler::jacobian_sv(const NodalVectorField& v, const QuadTensorField& pi) const {
  if (pi.size() != points_.size()) throw std::invalid_argument("jacobian_sv: pi field does not match the grid");
  return assemble_matrix(v, &pi, Linearization::kStressVelocity);
}

CsrMatrix MomentumAssembler::jacobian_picard(const NodalVectorField& v) const {
  return assemble_matrix(v, nullptr, Linearization::kPicard);
}

QuadTensorField MomentumAssembler::pi_from(const NodalVectorField& v) const {
  v.check(grid_);
  QuadTensorField pi(grid_.num_cells(), kQuadPerCell);
  for (int c = 0; c < grid_.num_cells(); ++c) {
    for (int q = 0; q < kQuadPerCell; ++q) {
      const SymTensor2 t = tau_at(v, c, q);
      pi.values[static_cast<std::size_t>(c) * kQuadPerCell + q] = pi_from_velocity(t, delta(t, params_.delta_min));
    }
  }
  return pi;
}

QuadTensorField MomentumAssembler::pi_increment(const NodalVectorField& v, const QuadTensorField& pi,
                                                std::span<const double> v_tilde) const {
  v.check(grid_);
  if (pi.size() != points_.size()) throw std::invalid_argument("pi_increment: pi field does not match the grid");
  const NodalVectorField vt(std::vector<double>(v_tilde.begin(), v_tilde.end()));
  vt.check(grid_);
  QuadTensorField inc(grid_.num_cells(), kQuadPerCell);
  for (int c = 0; c < grid_.num_cells(); ++c) {
    for (int q = 0; q < kQuadPerCell; ++q) {
      const std::size_t qi = static_cast<std::size_t>(c) * kQuadPerCell + q;
      const SymTensor2 t = tau_at(v, c, q);
      const SymTensor2 tt = tau_at(vt, c, q);
      const double dl = delta(t, params_.delta_min);
      const SymTensor2& pl = pi.values[qi];
      const ModifiedOuter mo(t, pl);
      inc.values[qi] = (1.0 / dl) * (t + tt) - pl - (2.0 / (dl * dl)) * mo.apply(tt);
    }
  }
  return inc;
}

double MomentumAssembler::pi_residual(const NodalVectorField& v, const QuadTensorField& pi) const {
  double worst = 0.0;
  for (int c = 0; c < grid_.num_cells(); ++c) {
    for (int q = 0; q < kQuadPerCell; ++q) {
      const SymTensor2 t = tau_at(v, c, q);
      const double dl = delta(t, params_.delta_min);
      const SymTensor2 r = dl * pi.values[static_cast<std::size_t>(c) * kQuadPerCell + q] - t;
      worst = std::max(worst, frobenius_norm(r) / dl);
    }
  }
  return worst;
}

void cell_diagnostics(const StructuredGrid& grid, const PhysicsParams& params, const NodalVectorField& v,
                      std::span<double> delta_avg, std::span<double> shear_avg) {
  v.check(grid);
  if (delta_avg.size() != static_cast<std::size_t>(grid.num_cells()) ||
      shear_avg.size() != static_cast<std::size_t>(grid.num_cells())) {
    throw std::invalid_argument("cell_diagnostics: output size mismatch");
  }
  const QuadPointSet quad = make_quad_points(grid);
  const auto& vals = v.values();
  for (int c = 0; c < grid.num_cells(); ++c) {
    const auto nodes = grid.cell_nodes(c);
    double d_sum = 0.0;
    double s_sum = 0.0;
    for (int q = 0; q < kQuadPerCell; ++q) {
      Mat2 g;
      for (int k = 0; k < 4; ++k) {
        const Vec2 grad = quad.shape[q].gradients[k];
        const double vx = vals[2 * nodes[k]];
        const double vy = vals[2 * nodes[k] + 1];
        g.xx += vx * grad.x;
        g.xy += vx * grad.y;
        g.yx += vy * grad.x;
        g.yy += vy * grad.y;
      }
      const SymTensor2 eps = strain_rate(g);
      d_sum += delta(tau(eps, params.e_ellipse), params.delta_min);
      s_sum += shear_deformation(eps);
    }
    delta_avg[c] = d_sum / kQuadPerCell;
    shear_avg[c] = s_sum / kQuadPerCell;
  }
}

std::vector<double> assemble_residual(const MomentumState& state) {
  return MomentumAssembler(state).residual(state.v);
}

double assemble_energy(const NodalVectorField& v, const MomentumState& state) {
  return MomentumAssembler(state).energy(v);
}

CsrMatrix assemble_jacobian_std(const MomentumState& state) {
  return MomentumAssembler(state).jacobian_std(state.v);
}

CsrMatrix assemble_jacobian_sv(const MomentumState& state) {
  return MomentumAssembler(state).jacobian_sv(state.v, state.pi);
}

void project_pi(QuadTensorField& pi) {
  for (auto& t : pi.values) {
    const double m = pi_magnitude(t);
    if (m > 1.0) t *= 1.0 / m;
  }
}

QuadTensorField update_pi(const MomentumState& state, std::span<const double> v_tilde, double alpha,
                          bool project) {
  const MomentumAssembler asmb(state);
  const QuadTensorField inc = asmb.pi_increment(state.v, state.pi, v_tilde);
  QuadTensorField next = state.pi;
  for (std::size_t i = 0; i < next.size(); ++i) next.values[i] += alpha * inc.values[i];
  if (project) project_pi(next);
  return next;
}

}  // namespace seaice
