#include "seaice/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "seaice/csr.hpp"

namespace seaice {

StructuredGrid::StructuredGrid(double length, int nx, int ny)
    : length_(length), nx_(nx), ny_(ny) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("grid: domain length must be positive");
  }
  if (nx < 1 || ny < 1) throw std::invalid_argument("grid: need at least one cell per side");
  if (nx != ny) throw std::invalid_argument("grid: anisotropic cells (dx != dy) are not supported");
  dx_ = length / nx;
  dy_ = length / ny;
  boundary_mask_.assign(num_nodes(), 0);
  for (int j = 0; j <= ny_; ++j) {
    for (int i = 0; i <= nx_; ++i) {
      if (i == 0 || j == 0 || i == nx_ || j == ny_) boundary_mask_[node_index(i, j)] = 1;
    }
  }
}

StructuredGrid build_grid(double length, int n) { return StructuredGrid(length, n, n); }

Vec2 StructuredGrid::node_coords(int node) const {
  const int i = node % (nx_ + 1);
  const int j = node / (nx_ + 1);
  return {i * dx_, j * dy_};
}

Vec2 StructuredGrid::cell_center(int cell) const {
  const int i = cell % nx_;
  const int j = cell / nx_;
  return {(i + 0.5) * dx_, (j + 0.5) * dy_};
}

std::array<int, 4> StructuredGrid::cell_nodes(int cell) const {
  const int i = cell % nx_;
  const int j = cell / nx_;
  return {node_index(i, j), node_index(i + 1, j), node_index(i + 1, j + 1), node_index(i, j + 1)};
}

std::vector<int> StructuredGrid::boundary_dofs() const {
  std::vector<int> dofs;
  for (int n = 0; n < num_nodes(); ++n) {
    if (boundary_mask_[n]) {
      dofs.push_back(dof(n, 0));
      dofs.push_back(dof(n, 1));
    }
  }
  return dofs;
}

void NodalVectorField::check(const StructuredGrid& grid) const {
  if (values_.size() != static_cast<std::size_t>(grid.num_dofs())) {
    throw std::invalid_argument("nodal field has " + std::to_string(values_.size()) +
                                " entries, grid needs " + std::to_string(grid.num_dofs()));
  }
}

void CellScalarField::check(const StructuredGrid& grid) const {
  if (values_.size() != static_cast<std::size_t>(grid.num_cells())) {
    throw std::invalid_argument("cell field has " + std::to_string(values_.size()) +
                                " entries, grid needs " + std::to_string(grid.num_cells()));
  }
}

void CellScalarField::check_range(const StructuredGrid& grid, double lo, double hi,
                                  const char* name) const {
  check(grid);
  for (double v : values_) {
    if (!(v >= lo && v <= hi)) {
      throw std::invalid_argument(std::string(name) + " value " + std::to_string(v) +
                                  " outside its admissible range");
    }
  }
}

namespace {
// Reference coordinates of the four cell nodes, counterclockwise.
constexpr std::array<Vec2, 4> kRefNodes{{{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}}};
}  // namespace

GaussRule gauss_quadrature() {
  const double g = 1.0 / std::sqrt(3.0);
  GaussRule rule;
  // Same counterclockwise order as the nodes.
  rule.points = {{{-g, -g}, {g, -g}, {g, g}, {-g, g}}};
  rule.weights = {1.0, 1.0, 1.0, 1.0};
  return rule;
}

ShapeValues shape_eval(const StructuredGrid& grid, int /*cell*/, const Vec2& ref) {
  ShapeValues s;
  const double jx = 2.0 / grid.dx();
  const double jy = 2.0 / grid.dy();
  for (int k = 0; k < 4; ++k) {
    const double xi = kRefNodes[k].x;
    const double eta = kRefNodes[k].y;
    s.values[k] = 0.25 * (1.0 + xi * ref.x) * (1.0 + eta * ref.y);
    s.gradients[k] = {0.25 * xi * (1.0 + eta * ref.y) * jx, 0.25 * eta * (1.0 + xi * ref.x) * jy};
  }
  return s;
}

Vec2 QuadPointSet::physical_point(const StructuredGrid& grid, int cell, int q) const {
  const Vec2 c = grid.cell_center(cell);
  return {c.x + 0.5 * grid.dx() * rule.points[q].x, c.y + 0.5 * grid.dy() * rule.points[q].y};
}

QuadPointSet make_quad_points(const StructuredGrid& grid) {
  QuadPointSet set;
  set.rule = gauss_quadrature();
  const double jac = 0.25 * grid.dx() * grid.dy();
  for (int q = 0; q < kQuadPerCell; ++q) {
    set.weights[q] = set.rule.weights[q] * jac;
    set.shape[q] = shape_eval(grid, 0, set.rule.points[q]);
  }
  return set;
}

void apply_dirichlet(CsrMatrix& matrix, std::span<double> rhs, const StructuredGrid& grid) {
  if (matrix.rows() != grid.num_dofs() || matrix.cols() != grid.num_dofs()) {
    throw std::invalid_argument("apply_dirichlet: matrix dimension does not match the grid");
  }
  if (rhs.size() != static_cast<std::size_t>(grid.num_dofs())) {
    throw std::invalid_argument("apply_dirichlet: rhs dimension does not match the grid");
  }
  const auto mask = grid.boundary_mask();
  const auto off = matrix.offsets();
  const auto col = matrix.columns();
  auto val = matrix.values();
  for (int i = 0; i < matrix.rows(); ++i) {
    const bool row_fixed = mask[i / 2] != 0;
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      const int j = col[k];
      if (row_fixed || mask[j / 2]) val[k] = (i == j) ? 1.0 : 0.0;
    }
    if (row_fixed) {
      if (matrix.find(i, i) < 0) throw std::invalid_argument("apply_dirichlet: missing diagonal entry");
      rhs[i] = 0.0;
    }
  }
}

void zero_boundary(std::span<double> values, const StructuredGrid& grid) {
  const auto mask = grid.boundary_mask();
  for (int n = 0; n < grid.num_nodes(); ++n) {
    if (mask[n]) {
      values[2 * n] = 0.0;
      values[2 * n + 1] = 0.0;
    }
  }
}

}  // namespace seaice
