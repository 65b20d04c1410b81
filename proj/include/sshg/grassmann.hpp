#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sshg/dual.hpp"

namespace sshg {

constexpr int kMaxGenerators = 12;

enum class Parity { Even, Odd, Inhomogeneous };

/// Koszul sign picked up when reordering e_S * e_T (S, T disjoint bitmasks)
/// into the canonical ascending-generator order.
inline int koszul_sign(unsigned s, unsigned t) {
  int swaps = 0;
  while (t) {
    unsigned low = t & (t - 1);
    int pos = std::countr_zero(t ^ low);
    swaps += std::popcount(s >> (pos + 1));
    t = low;
  }
  return (swaps & 1) ? -1 : 1;
}

/// Element of the complex exterior algebra on `generators()` anticommuting
/// generators. Coefficients are stored densely, indexed by the subset
/// bitmask of generators appearing in each monomial. Immutable in spirit:
/// all operations return new values.
template <class S>
class GrassmannT {
 public:
  GrassmannT() : n_(0), c_(1) {}
  explicit GrassmannT(int n) : n_(check_n(n)), c_(std::size_t{1} << n) {}

  static GrassmannT scalar(int n, S value) {
    GrassmannT x(n);
    x.c_[0] = value;
    return x;
  }
  static GrassmannT generator(int n, int bit) {
    return basis(n, 1u << bit, S(1.0));
  }
  static GrassmannT basis(int n, unsigned mask, S coeff) {
    GrassmannT x(n);
    if (mask >= x.c_.size()) throw std::invalid_argument("grassmann: mask out of range");
    x.c_[mask] = coeff;
    return x;
  }

  int generators() const { return n_; }
  std::size_t size() const { return c_.size(); }
  const S& operator[](unsigned mask) const { return c_[mask]; }
  S& operator[](unsigned mask) { return c_[mask]; }

  GrassmannT& operator+=(const GrassmannT& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  GrassmannT& operator-=(const GrassmannT& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  GrassmannT& operator*=(S s) {
    for (auto& c : c_) c *= s;
    return *this;
  }

  friend GrassmannT operator+(GrassmannT a, const GrassmannT& b) { return a += b; }
  friend GrassmannT operator-(GrassmannT a, const GrassmannT& b) { return a -= b; }
  friend GrassmannT operator*(GrassmannT a, S s) { return a *= s; }
  friend GrassmannT operator*(S s, GrassmannT a) { return a *= s; }
  friend GrassmannT operator-(const GrassmannT& a) {
    GrassmannT r(a.n_);
    for (std::size_t i = 0; i < a.c_.size(); ++i) r.c_[i] = -a.c_[i];
    return r;
  }

  /// Bilinear product with the Koszul sign.
  friend GrassmannT operator*(const GrassmannT& a, const GrassmannT& b) {
    a.check_same(b);
    GrassmannT r(a.n_);
    const std::size_t m = a.c_.size();
    for (unsigned s = 0; s < m; ++s) {
      if (is_zero(a.c_[s])) continue;
      for (unsigned t = 0; t < m; ++t) {
        if (s & t) continue;
        if (is_zero(b.c_[t])) continue;
        S term = a.c_[s] * b.c_[t];
        if (koszul_sign(s, t) < 0) term = -term;
        r.c_[s | t] += term;
      }
    }
    return r;
  }

 private:
  static int check_n(int n) {
    if (n < 0 || n > kMaxGenerators) throw std::invalid_argument("grassmann: generator count out of range");
    return n;
  }
  void check_same(const GrassmannT& o) const {
    if (n_ != o.n_) throw std::invalid_argument("grassmann: mismatched generator counts");
  }
  static bool is_zero(const S& s) { return s == S(0.0); }

  int n_;
  std::vector<S> c_;
};

using Grassmann = GrassmannT<Cplx>;
using GrassmannD = GrassmannT<Dual>;

template <class S>
double max_abs(const GrassmannT<S>& x) {
  double m = 0.0;
  for (unsigned i = 0; i < x.size(); ++i) m = std::max(m, ScalarTraits<S>::abs(x[i]));
  return m;
}

template <class S>
bool approx_equal(const GrassmannT<S>& a, const GrassmannT<S>& b, double tol = 1e-12) {
  if (a.generators() != b.generators()) return false;
  return max_abs(a - b) <= tol;
}

template <class S>
bool exactly_zero(const GrassmannT<S>& x) {
  for (unsigned i = 0; i < x.size(); ++i)
    if (!(x[i] == S(0.0))) return false;
  return true;
}

template <class S>
Parity parity(const GrassmannT<S>& x) {
  bool even = false, odd = false;
  for (unsigned i = 0; i < x.size(); ++i) {
    if (x[i] == S(0.0)) continue;
    (std::popcount(i) & 1 ? odd : even) = true;
  }
  if (even && odd) return Parity::Inhomogeneous;
  return odd ? Parity::Odd : Parity::Even;
}

template <class S>
bool is_even(const GrassmannT<S>& x) { return parity(x) == Parity::Even; }
template <class S>
bool is_odd(const GrassmannT<S>& x) { return parity(x) == Parity::Odd; }

template <class S>
S body(const GrassmannT<S>& x) { return x[0]; }

template <class S>
GrassmannT<S> soul(const GrassmannT<S>& x) {
  GrassmannT<S> r = x;
  r[0] = S(0.0);
  return r;
}

/// Left derivative with respect to generator `bit`:
/// d(e_S) = 0 if bit not in S, else (-1)^(#generators in S before bit) e_{S\bit}.
template <class S>
GrassmannT<S> left_derivative(const GrassmannT<S>& x, int bit) {
  if (bit < 0 || bit >= x.generators()) throw std::invalid_argument("grassmann: unknown generator");
  GrassmannT<S> r(x.generators());
  const unsigned g = 1u << bit;
  const unsigned below = g - 1;
  for (unsigned m = 0; m < x.size(); ++m) {
    if (!(m & g)) continue;
    S c = x[m];
    if (std::popcount(m & below) & 1) c = -c;
    r[m ^ g] = c;
  }
  return r;
}

namespace detail {

/// f(body + soul) = sum_k f^{(k)}(body) soul^k / k!; the soul is nilpotent
/// so the sum terminates. `taylor(k)` must return f^{(k)}(body)/k!.
template <class S, class F>
GrassmannT<S> apply_series(const GrassmannT<S>& x, F&& taylor) {
  if (parity(x) != Parity::Even) throw std::domain_error("grassmann: analytic function of non-even element");
  GrassmannT<S> s = soul(x);
  GrassmannT<S> pw = GrassmannT<S>::scalar(x.generators(), S(1.0));
  GrassmannT<S> acc(x.generators());
  const int kmax = x.generators() / 2;
  for (int k = 0; k <= kmax; ++k) {
    acc += pw * taylor(k);
    if (k < kmax) {
      pw = pw * s;
      if (exactly_zero(pw)) break;
    }
  }
  return acc;
}

}  // namespace detail

template <class S>
GrassmannT<S> exp_of(const GrassmannT<S>& x) {
  S e = ScalarTraits<S>::exp(body(x));
  double fact = 1.0;
  return detail::apply_series(x, [&](int k) {
    if (k > 0) fact *= k;
    return e * S(1.0 / fact);
  });
}

template <class S>
GrassmannT<S> sinh_of(const GrassmannT<S>& x) {
  S sh = ScalarTraits<S>::sinh(body(x));
  S ch = ScalarTraits<S>::cosh(body(x));
  double fact = 1.0;
  return detail::apply_series(x, [&](int k) {
    if (k > 0) fact *= k;
    return ((k & 1) ? ch : sh) * S(1.0 / fact);
  });
}

template <class S>
GrassmannT<S> cosh_of(const GrassmannT<S>& x) {
  S sh = ScalarTraits<S>::sinh(body(x));
  S ch = ScalarTraits<S>::cosh(body(x));
  double fact = 1.0;
  return detail::apply_series(x, [&](int k) {
    if (k > 0) fact *= k;
    return ((k & 1) ? sh : ch) * S(1.0 / fact);
  });
}

/// x^r through the principal branch of the body. Generalized binomial
/// series: f^{(k)}(b)/k! = C(r,k) b^{r-k}.
template <class S>
GrassmannT<S> pow_of(const GrassmannT<S>& x, Cplx r) {
  if (ScalarTraits<S>::abs(body(x)) == 0.0) throw std::domain_error("grassmann: power of element with zero body");
  S b = body(x);
  return detail::apply_series(x, [&](int k) {
    Cplx binom = 1.0;
    for (int j = 0; j < k; ++j) binom *= (r - static_cast<double>(j)) / static_cast<double>(j + 1);
    return ScalarTraits<S>::pow(b, r - static_cast<double>(k)) * S(binom);
  });
}

template <class S>
GrassmannT<S> sqrt_of(const GrassmannT<S>& x) { return pow_of(x, Cplx(0.5)); }

template <class S>
GrassmannT<S> inverse_of(const GrassmannT<S>& x) { return pow_of(x, Cplx(-1.0)); }

template <class S>
GrassmannT<S> log_of(const GrassmannT<S>& x) {
  if (ScalarTraits<S>::abs(body(x)) == 0.0) throw std::domain_error("grassmann: log of element with zero body");
  S b = body(x);
  S lg = ScalarTraits<S>::log(b);
  return detail::apply_series(x, [&](int k) {
    if (k == 0) return lg;
    // f^{(k)}(b)/k! = (-1)^{k+1} b^{-k} / k
    S v = ScalarTraits<S>::pow(b, Cplx(-static_cast<double>(k))) * S(1.0 / k);
    return (k % 2 == 0) ? -v : v;
  });
}

/// Re-embed into an algebra with `extra` additional top generators.
template <class S>
GrassmannT<S> extend_generators(const GrassmannT<S>& x, int extra) {
  GrassmannT<S> r(x.generators() + extra);
  for (unsigned m = 0; m < x.size(); ++m) r[m] = x[m];
  return r;
}

/// Named, contiguous generator labels. Bit positions are assigned in
/// registration order.
class GeneratorTable {
 public:
  int add(const std::string& label) {
    if (index_.count(label)) throw std::invalid_argument("generator label already registered: " + label);
    int bit = static_cast<int>(names_.size());
    if (bit >= kMaxGenerators) throw std::invalid_argument("too many generators");
    names_.push_back(label);
    index_[label] = bit;
    return bit;
  }
  int bit(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw std::invalid_argument("unknown generator label: " + label);
    return it->second;
  }
  bool has(const std::string& label) const { return index_.count(label) != 0; }
  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int bit) const { return names_.at(bit); }

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> index_;
};

template <class S>
GrassmannT<S> left_derivative(const GrassmannT<S>& x, const GeneratorTable& table, const std::string& label) {
  return left_derivative(x, table.bit(label));
}

}  // namespace sshg
