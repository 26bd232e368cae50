#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "seaice/tensor.hpp"

namespace seaice {

class CsrMatrix;

/// Uniform quadrilateral mesh of the square (0, L)^2.
///
/// Nodes are numbered row by row, node (i, j) = j * (nx + 1) + i, and cells
/// likewise, cell (i, j) = j * nx + i. Velocity DOFs are interleaved: the x and
/// y components of node k are DOFs 2k and 2k + 1.
class StructuredGrid {
 public:
  /// Throws std::invalid_argument unless length > 0, nx, ny >= 1 and nx == ny
  /// (cells must be square).
  StructuredGrid(double length, int nx, int ny);

  double length() const { return length_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double cell_area() const { return dx_ * dy_; }

  int num_nodes() const { return (nx_ + 1) * (ny_ + 1); }
  int num_cells() const { return nx_ * ny_; }
  int num_dofs() const { return 2 * num_nodes(); }

  int node_index(int i, int j) const { return j * (nx_ + 1) + i; }
  int cell_index(int i, int j) const { return j * nx_ + i; }
  static int dof(int node, int component) { return 2 * node + component; }

  Vec2 node_coords(int node) const;
  Vec2 cell_center(int cell) const;

  /// Counterclockwise: lower-left, lower-right, upper-right, upper-left.
  std::array<int, 4> cell_nodes(int cell) const;

  bool is_boundary_node(int node) const { return boundary_mask_[node] != 0; }
  std::span<const char> boundary_mask() const { return boundary_mask_; }
  std::vector<int> boundary_dofs() const;

 private:
  double length_;
  int nx_;
  int ny_;
  double dx_;
  double dy_;
  std::vector<char> boundary_mask_;
};

/// Uniform square grid with n cells per side.
StructuredGrid build_grid(double length, int n);

/// Q1 velocity field: two values per node, interleaved as in StructuredGrid.
class NodalVectorField {
 public:
  NodalVectorField() = default;
  explicit NodalVectorField(const StructuredGrid& grid) : values_(grid.num_dofs(), 0.0) {}
  explicit NodalVectorField(std::vector<double> values) : values_(std::move(values)) {}

  Vec2 at(int node) const { return {values_[2 * node], values_[2 * node + 1]}; }
  void set(int node, const Vec2& v) {
    values_[2 * node] = v.x;
    values_[2 * node + 1] = v.y;
  }

  std::size_t size() const { return values_.size(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  /// Throws std::invalid_argument if the length does not match the grid.
  void check(const StructuredGrid& grid) const;

  bool operator==(const NodalVectorField&) const = default;

 private:
  std::vector<double> values_;
};

/// Piecewise-constant (Q0) cell field.
class CellScalarField {
 public:
  CellScalarField() = default;
  explicit CellScalarField(const StructuredGrid& grid, double value = 0.0)
      : values_(grid.num_cells(), value) {}
  explicit CellScalarField(std::vector<double> values) : values_(std::move(values)) {}

  double operator[](int cell) const { return values_[cell]; }
  double& operator[](int cell) { return values_[cell]; }

  std::size_t size() const { return values_.size(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  void check(const StructuredGrid& grid) const;
  /// Checks length and that every value lies in [lo, hi].
  void check_range(const StructuredGrid& grid, double lo, double hi, const char* name) const;

  bool operator==(const CellScalarField&) const = default;

 private:
  std::vector<double> values_;
};

inline constexpr int kQuadPerCell = 4;

/// Tensor-product Gauss rule on the reference square [-1, 1]^2.
struct GaussRule {
  std::array<Vec2, kQuadPerCell> points;
  std::array<double, kQuadPerCell> weights;
};

/// 2x2 Gauss rule: points (+-1/sqrt(3), +-1/sqrt(3)), unit weights.
GaussRule gauss_quadrature();

struct ShapeValues {
  std::array<double, 4> values;
  std::array<Vec2, 4> gradients;  // physical gradients
};

/// Bilinear basis at a reference point. Since every cell is an axis-aligned
/// square of size dx, the result does not depend on which cell is evaluated.
ShapeValues shape_eval(const StructuredGrid& grid, int cell, const Vec2& ref_point);

/// Quadrature data shared by all cells of a uniform grid.
struct QuadPointSet {
  GaussRule rule;
  std::array<double, kQuadPerCell> weights;  // physical, sum to the cell area
  std::array<ShapeValues, kQuadPerCell> shape;

  Vec2 physical_point(const StructuredGrid& grid, int cell, int q) const;
};

QuadPointSet make_quad_points(const StructuredGrid& grid);

/// Symmetric elimination of the homogeneous Dirichlet DOFs: boundary rows and
/// columns are zeroed, the diagonal set to one and rhs entries zeroed.
void apply_dirichlet(CsrMatrix& matrix, std::span<double> rhs, const StructuredGrid& grid);

/// Zeroes the boundary entries of a DOF vector.
void zero_boundary(std::span<double> values, const StructuredGrid& grid);

}  // namespace seaice
