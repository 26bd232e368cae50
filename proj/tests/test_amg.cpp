#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "seaice/amg.hpp"
#include "seaice/assembly.hpp"
#include "support.hpp"

using namespace seaice;

namespace {

CsrMatrix poisson1d(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, 2.0});
    if (i > 0) t.push_back({i, i - 1, -1.0});
    if (i + 1 < n) t.push_back({i, i + 1, -1.0});
  }
  return CsrMatrix::from_triplets(n, n, t);
}

CsrMatrix poisson2d(int m) {
  std::vector<Triplet> t;
  auto id = [m](int i, int j) { return j * m + i; };
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      t.push_back({id(i, j), id(i, j), 4.0});
      if (i > 0) t.push_back({id(i, j), id(i - 1, j), -1.0});
      if (i + 1 < m) t.push_back({id(i, j), id(i + 1, j), -1.0});
      if (j > 0) t.push_back({id(i, j), id(i, j - 1), -1.0});
      if (j + 1 < m) t.push_back({id(i, j), id(i, j + 1), -1.0});
    }
  }
  return CsrMatrix::from_triplets(m * m, m * m, t);
}

AmgParams scalar_params(double theta) {
  AmgParams p;
  p.strong_threshold = theta;
  p.nodal = false;
  p.num_components = 1;
  return p;
}

std::vector<double> random_vector(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double a_norm(const CsrMatrix& a, const std::vector<double>& e) { return std::sqrt(dot(e, spmv(a, e))); }

}  // namespace

TEST_CASE("1D Poisson coarsens to every other point") {
  const int n = 31;
  const CsrMatrix a = poisson1d(n);
  const AmgParams p = scalar_params(0.25);
  const CsrMatrix s = strength_graph(a, p);
  const std::vector<char> c = rs_coarsening(s);
  int coarse = 0;
  for (int i = 0; i < n; ++i) {
    coarse += c[i];
    if (i > 0) CHECK(c[i] != c[i - 1]);
  }
  CHECK((coarse == 15 || coarse == 16));

  // Linear interpolation: F points take 1/2 from each coarse neighbour.
  const CsrMatrix pmat = classical_interpolation(a, s, c);
  CHECK(pmat.rows() == n);
  CHECK(pmat.cols() == coarse);
  for (int i = 0; i < n; ++i) {
    const auto off = pmat.offsets();
    double sum = 0.0;
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      sum += pmat.values()[k];
      if (c[i]) CHECK(pmat.values()[k] == 1.0);
    }
    const bool interior = c[i] || (i > 0 && i + 1 < n);
    if (interior) CHECK(sum == doctest::Approx(1.0));
  }
}

TEST_CASE("strength graph on a small example") {
  // Row 0: |-1| and |-0.1| against max 1: with theta 0.25 only column 1 is strong.
  const CsrMatrix a =
      CsrMatrix::from_dense(3, 3, std::vector<double>{2, -1, -0.1, -1, 2, -1, -0.1, -1, 2});
  const CsrMatrix s = strength_graph(a, scalar_params(0.25));
  CHECK(s.find(0, 1) >= 0);
  CHECK(s.find(0, 2) < 0);
  CHECK(s.find(0, 0) < 0);
  CHECK(s.find(1, 0) >= 0);
  CHECK(s.find(1, 2) >= 0);
}

TEST_CASE("small systems are solved exactly by a single level") {
  const CsrMatrix a = poisson1d(40);
  const AmgHierarchy h(a, scalar_params(0.25));
  CHECK(h.num_levels() == 1);
  std::mt19937 rng(1);
  const std::vector<double> b = random_vector(40, rng);
  std::vector<double> x(40);
  h.apply(b, x);
  std::vector<double> r(40);
  residual(a, x, b, r);
  CHECK(norm2(r) <= 1e-13 * norm2(b));
}

TEST_CASE("hierarchy structure on 2D Poisson") {
  const CsrMatrix a = poisson2d(64);
  const AmgHierarchy h(a, scalar_params(0.25));
  CHECK(h.num_levels() >= 3);
  for (int l = 1; l < h.num_levels(); ++l) {
    CHECK(h.level(l).a.rows() < h.level(l - 1).a.rows());
  }
  CHECK(h.level(h.num_levels() - 1).a.rows() <= 64);
  CHECK(h.operator_complexity() <= 2.5);

  // Galerkin coarse operators and R = P^T.
  for (int l = 0; l + 1 < h.num_levels(); ++l) {
    const AmgLevel& fine = h.level(l);
    CHECK(fine.restriction.to_dense() == fine.interpolation.transpose().to_dense());
    const CsrMatrix rap = multiply(fine.restriction, multiply(fine.a, fine.interpolation));
    const auto expect = rap.to_dense();
    const auto got = h.level(l + 1).a.to_dense();
    REQUIRE(expect.size() == got.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < got.size(); ++k) worst = std::max(worst, std::abs(expect[k] - got[k]));
    CHECK(worst <= 1e-12 * rap.max_abs());
  }
}

TEST_CASE("V-cycle is symmetric and contracts on 2D Poisson") {
  const CsrMatrix a = poisson2d(64);
  const AmgHierarchy h(a, scalar_params(0.25));
  const int n = a.rows();
  std::mt19937 rng(2);
  for (int t = 0; t < 5; ++t) {
    const std::vector<double> x = random_vector(n, rng);
    const std::vector<double> y = random_vector(n, rng);
    std::vector<double> bx(n), by(n);
    h.apply(x, bx);
    h.apply(y, by);
    const double l = dot(bx, y);
    const double r = dot(x, by);
    CHECK(std::abs(l - r) <= 1e-10 * std::abs(l));
  }

  // Stationary iteration x <- x + B (b - A x) with b = 0: the error is the iterate.
  std::vector<double> e = random_vector(n, rng);
  std::vector<double> r(n), z(n);
  const std::vector<double> zero(n, 0.0);
  for (int it = 0; it < 8; ++it) {
    const double before = a_norm(a, e);
    residual(a, e, zero, r);
    h.apply(r, z);
    axpy(1.0, z, e);
    const double after = a_norm(a, e);
    CHECK(after <= 0.2 * before);
  }
}

TEST_CASE("SSOR sweeps do not increase the energy norm of the error") {
  const CsrMatrix a = poisson2d(20);
  const int n = a.rows();
  std::vector<double> inv(n);
  const auto d = a.diagonal();
  for (int i = 0; i < n; ++i) inv[i] = 1.0 / d[i];
  std::mt19937 rng(3);
  const std::vector<double> xs = random_vector(n, rng);
  const std::vector<double> b = spmv(a, xs);
  std::vector<double> x(n, 0.0);
  auto err = [&] {
    std::vector<double> e(n);
    for (int i = 0; i < n; ++i) e[i] = x[i] - xs[i];
    return a_norm(a, e);
  };
  double prev = err();
  for (int s = 0; s < 20; ++s) {
    ssor_sweep(a, inv, b, x);
    const double now = err();
    CHECK(now <= prev * (1 + 1e-14));
    prev = now;
  }
  CHECK(prev < 0.5 * a_norm(a, xs));
}

TEST_CASE("parameter validation") {
  const CsrMatrix a = poisson1d(10);
  AmgParams p;
  p.num_components = 2;
  p.nodal = true;
  const CsrMatrix odd = poisson1d(9);
  CHECK_THROWS_AS(AmgHierarchy(odd, p), std::invalid_argument);
  p.num_components = 0;
  CHECK_THROWS_AS(AmgHierarchy(a, p), std::invalid_argument);
}

TEST_CASE("operator complexity on the first Problem II Jacobian at 4 km") {
  const auto f = testing::first_step(problem2_spec(4e3, 1));
  const CsrMatrix j = assemble_jacobian_sv(f.state);
  const AmgHierarchy h(j, AmgParams{});
  CHECK(h.operator_complexity() <= 2.5);
  CHECK(h.level(h.num_levels() - 1).a.rows() <= 64);

  std::mt19937 rng(4);
  const std::vector<double> b = random_vector(j.rows(), rng);
  std::vector<double> x(j.rows(), 0.0);
  const KrylovStats s = fgmres(j, h, b, x);
  CHECK(s.converged);
  CHECK(s.iterations <= 30);
}
