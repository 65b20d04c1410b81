#pragma once

#include <cmath>
#include <complex>

namespace sshg {

using Cplx = std::complex<double>;

/// First-order forward-mode dual number over complex coefficients.
/// Used for exact partial derivatives of defect potentials and for
/// spacetime derivatives of analytic soliton data.
struct Dual {
  Cplx v{};  // value
  Cplx d{};  // derivative seed

  Dual() = default;
  Dual(Cplx value) : v(value) {}
  Dual(Cplx value, Cplx deriv) : v(value), d(deriv) {}
  Dual(double value) : v(value) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) {
    d = d * o.v + v * o.d;
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    v /= o.v;
    d = (d - v * o.d) / o.v;
    return *this;
  }
};

inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator*(Dual a, const Dual& b) { return a *= b; }
inline Dual operator/(Dual a, const Dual& b) { return a /= b; }
inline Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
inline bool operator==(const Dual& a, const Dual& b) { return a.v == b.v && a.d == b.d; }

inline Dual exp(const Dual& x) { Cplx e = std::exp(x.v); return {e, e * x.d}; }
inline Dual sinh(const Dual& x) { return {std::sinh(x.v), std::cosh(x.v) * x.d}; }
inline Dual cosh(const Dual& x) { return {std::cosh(x.v), std::sinh(x.v) * x.d}; }
inline Dual tanh(const Dual& x) {
  Cplx t = std::tanh(x.v);
  return {t, (1.0 - t * t) * x.d};
}
inline Dual log(const Dual& x) { return {std::log(x.v), x.d / x.v}; }
inline Dual sqrt(const Dual& x) {
  Cplx s = std::sqrt(x.v);
  return {s, x.d / (2.0 * s)};
}
inline Dual pow(const Dual& x, Cplx r) {
  Cplx p = std::pow(x.v, r);
  return {p, r * std::pow(x.v, r - 1.0) * x.d};
}

/// Second-order dual: value plus first and second derivative with respect
/// to one real/complex parameter. Used for analytic profiles that need
/// second spacetime derivatives.
struct Dual2 {
  Cplx v{}, d{}, dd{};

  Dual2() = default;
  Dual2(Cplx value) : v(value) {}
  Dual2(Cplx value, Cplx d1, Cplx d2 = 0.0) : v(value), d(d1), dd(d2) {}
  Dual2(double value) : v(value) {}
};

inline Dual2 operator+(const Dual2& a, const Dual2& b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
inline Dual2 operator-(const Dual2& a, const Dual2& b) { return {a.v - b.v, a.d - b.d, a.dd - b.dd}; }
inline Dual2 operator-(const Dual2& a) { return {-a.v, -a.d, -a.dd}; }
inline Dual2 operator*(const Dual2& a, const Dual2& b) {
  return {a.v * b.v, a.v * b.d + a.d * b.v, a.v * b.dd + 2.0 * a.d * b.d + a.dd * b.v};
}
inline Dual2 operator/(const Dual2& a, const Dual2& b) {
  Dual2 r;
  r.v = a.v / b.v;
  r.d = (a.d - r.v * b.d) / b.v;
  r.dd = (a.dd - r.v * b.dd - 2.0 * r.d * b.d) / b.v;
  return r;
}
inline Dual2 exp(const Dual2& x) {
  Cplx e = std::exp(x.v);
  return {e, e * x.d, e * (x.d * x.d + x.dd)};
}
inline Dual2 log(const Dual2& x) {
  Cplx d1 = x.d / x.v;
  return {std::log(x.v), d1, x.dd / x.v - d1 * d1};
}
inline Dual2 sinh(const Dual2& x) {
  Cplx s = std::sinh(x.v), c = std::cosh(x.v);
  return {s, c * x.d, c * x.dd + s * x.d * x.d};
}
inline Dual2 cosh(const Dual2& x) {
  Cplx s = std::sinh(x.v), c = std::cosh(x.v);
  return {c, s * x.d, s * x.dd + c * x.d * x.d};
}
inline Dual2 sqrt(const Dual2& x) {
  Cplx s = std::sqrt(x.v);
  Cplx d1 = x.d / (2.0 * s);
  return {s, d1, (x.dd / 2.0 - d1 * d1) / s};
}

/// Traits shared by the plain complex scalar and the dual scalar so that
/// the Grassmann algebra and every field evaluator can be instantiated
/// over either.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Cplx> {
  static Cplx exp(Cplx x) { return std::exp(x); }
  static Cplx sinh(Cplx x) { return std::sinh(x); }
  static Cplx cosh(Cplx x) { return std::cosh(x); }
  static Cplx log(Cplx x) { return std::log(x); }
  static Cplx sqrt(Cplx x) { return std::sqrt(x); }
  static Cplx pow(Cplx x, Cplx r) { return std::pow(x, r); }
  static double abs(Cplx x) { return std::abs(x); }
  static Cplx value(Cplx x) { return x; }
};

template <>
struct ScalarTraits<Dual> {
  static Dual exp(const Dual& x) { return sshg::exp(x); }
  static Dual sinh(const Dual& x) { return sshg::sinh(x); }
  static Dual cosh(const Dual& x) { return sshg::cosh(x); }
  static Dual log(const Dual& x) { return sshg::log(x); }
  static Dual sqrt(const Dual& x) { return sshg::sqrt(x); }
  static Dual pow(const Dual& x, Cplx r) { return sshg::pow(x, r); }
  static double abs(const Dual& x) { return std::abs(x.v); }
  static Cplx value(const Dual& x) { return x.v; }
};

}  // namespace sshg
