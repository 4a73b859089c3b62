#pragma once

#include <cmath>

namespace fbpinn {

// Truncated second-order Taylor value along a single spatial direction.
// `val` is the function value, `d1` and `d2` the first and second
// directional derivatives along the seeded coordinate. Carrying both
// derivatives through every evaluation is what lets residual operators
// (d/dx, Laplacian) be read off exactly at a point.
struct Jet2 {
  double val = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

// Seed a coordinate variable along its own direction.
inline Jet2 jet_var(double x) { return {x, 1.0, 0.0}; }

// Embed a constant; derivatives vanish identically.
inline Jet2 jet_const(double c) { return {c, 0.0, 0.0}; }

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  return {a.val + b.val, a.d1 + b.d1, a.d2 + b.d2};
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
  return {a.val - b.val, a.d1 - b.d1, a.d2 - b.d2};
}

inline Jet2 operator-(const Jet2& a) { return {-a.val, -a.d1, -a.d2}; }

// Product rule truncated at second order:
// (uv)'' = u v'' + 2 u' v' + u'' v.
inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  return {a.val * b.val,
          a.val * b.d1 + a.d1 * b.val,
          a.val * b.d2 + 2.0 * a.d1 * b.d1 + a.d2 * b.val};
}

inline Jet2 operator*(double c, const Jet2& a) {
  return {c * a.val, c * a.d1, c * a.d2};
}
inline Jet2 operator*(const Jet2& a, double c) { return c * a; }

inline Jet2 operator+(const Jet2& a, double c) { return {a.val + c, a.d1, a.d2}; }
inline Jet2 operator+(double c, const Jet2& a) { return a + c; }
inline Jet2 operator-(const Jet2& a, double c) { return {a.val - c, a.d1, a.d2}; }
inline Jet2 operator-(double c, const Jet2& a) { return {c - a.val, -a.d1, -a.d2}; }

inline Jet2& operator+=(Jet2& a, const Jet2& b) {
  a.val += b.val;
  a.d1 += b.d1;
  a.d2 += b.d2;
  return a;
}

// Chain rule for an analytic primitive with value f, derivative df and
// second derivative ddf at u.val.
inline Jet2 jet_lift(const Jet2& u, double f, double df, double ddf) {
  return {f, df * u.d1, df * u.d2 + ddf * u.d1 * u.d1};
}

inline Jet2 tanh(const Jet2& u) {
  const double t = std::tanh(u.val);
  const double s = 1.0 - t * t;
  return jet_lift(u, t, s, -2.0 * t * s);
}

inline Jet2 sin(const Jet2& u) {
  const double s = std::sin(u.val);
  const double c = std::cos(u.val);
  return jet_lift(u, s, c, -s);
}

inline Jet2 cos(const Jet2& u) {
  const double s = std::sin(u.val);
  const double c = std::cos(u.val);
  return jet_lift(u, c, -s, -c);
}

// Integer power, n >= 0.
inline Jet2 powi(const Jet2& u, int n) {
  if (n == 0) return jet_const(1.0);
  if (n == 1) return u;
  double p2 = 1.0;  // u^(n-2)
  for (int i = 0; i < n - 2; ++i) p2 *= u.val;
  const double p1 = p2 * u.val;
  const double p0 = p1 * u.val;
  return jet_lift(u, p0, n * p1, static_cast<double>(n) * (n - 1) * p2);
}

}  // namespace fbpinn
