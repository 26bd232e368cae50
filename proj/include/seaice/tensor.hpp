#pragma once

#include <cmath>

namespace seaice {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
};

inline Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
inline Vec2 operator*(double s, Vec2 a) { return a *= s; }
inline Vec2 operator*(Vec2 a, double s) { return a *= s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

/// General 2x2 matrix; used for velocity gradients with entry (a, b) = d v_a / d x_b.
struct Mat2 {
  double xx = 0.0;
  double xy = 0.0;
  double yx = 0.0;
  double yy = 0.0;
};

inline Vec2 operator*(const Mat2& m, const Vec2& v) {
  return {m.xx * v.x + m.xy * v.y, m.yx * v.x + m.yy * v.y};
}

/// Symmetric 2x2 tensor, stored by its three independent components.
struct SymTensor2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double trace() const { return xx + yy; }

  SymTensor2& operator+=(const SymTensor2& o) {
    xx += o.xx;
    xy += o.xy;
    yy += o.yy;
    return *this;
  }
  SymTensor2& operator-=(const SymTensor2& o) {
    xx -= o.xx;
    xy -= o.xy;
    yy -= o.yy;
    return *this;
  }
  SymTensor2& operator*=(double s) {
    xx *= s;
    xy *= s;
    yy *= s;
    return *this;
  }

  static SymTensor2 identity() { return {1.0, 0.0, 1.0}; }
};

inline SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) { return a += b; }
inline SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) { return a -= b; }
inline SymTensor2 operator*(double s, SymTensor2 a) { return a *= s; }
inline SymTensor2 operator*(SymTensor2 a, double s) { return a *= s; }

/// Frobenius inner product a:b.
inline double contract(const SymTensor2& a, const SymTensor2& b) {
  return a.xx * b.xx + 2.0 * a.xy * b.xy + a.yy * b.yy;
}

inline double frobenius_norm(const SymTensor2& a) { return std::sqrt(contract(a, a)); }

}  // namespace seaice
