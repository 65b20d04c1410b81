#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <utility>

#include "sshg/grassmann.hpp"

namespace sshg {

/// Superspace layout: the two theta generators occupy the two highest bit
/// positions on top of `base` ordinary generators, so stripping them from a
/// mask never crosses a lower generator.
struct ThetaSpace {
  int base = 0;
  int total() const { return base + 2; }
  int t1_bit() const { return base; }
  int t2_bit() const { return base + 1; }
  unsigned t1_mask() const { return 1u << t1_bit(); }
  unsigned t2_mask() const { return 1u << t2_bit(); }
  Grassmann theta1() const { return Grassmann::generator(total(), t1_bit()); }
  Grassmann theta2() const { return Grassmann::generator(total(), t2_bit()); }
};

/// Embed an element over the base generators into the full superspace.
inline Grassmann lift(const Grassmann& x, const ThetaSpace& sp) {
  if (x.generators() == sp.total()) return x;
  if (x.generators() != sp.base) throw std::invalid_argument("superfield: element not over base generators");
  return extend_generators(x, 2);
}

/// Drop the theta bits; requires all theta-sector coefficients to be zero.
inline Grassmann restrict_to_base(const Grassmann& X, const ThetaSpace& sp) {
  Grassmann r(sp.base);
  for (unsigned m = 0; m < X.size(); ++m) {
    if (X[m] == Cplx(0.0)) continue;
    if (m >> sp.base) throw std::invalid_argument("superfield: element has theta content");
    r[m] = X[m];
  }
  return r;
}

/// Coefficient of theta1^s1 theta2^s2 (left factor) in X, over the base
/// generators: X = sum over sectors of theta-monomial * coefficient.
inline Grassmann theta_sector(const Grassmann& X, bool s1, bool s2, const ThetaSpace& sp) {
  unsigned tmask = (s1 ? sp.t1_mask() : 0u) | (s2 ? sp.t2_mask() : 0u);
  Grassmann r(sp.base);
  bool single = (s1 != s2);
  for (unsigned s = 0; s < (1u << sp.base); ++s) {
    Cplx c = X[s | tmask];
    // theta e_S = (-1)^{|S|} e_{S+theta}; theta1 theta2 e_S = +e_{S+both}.
    if (single && (std::popcount(s) & 1)) c = -c;
    r[s] = c;
  }
  return r;
}

/// The four component fields of one superfield in the standard expansion
/// X = phi - i theta1 psibar + i theta2 psi - i theta1 theta2 F.
struct Components {
  Grassmann phi, psibar, psi, F;
};

/// Grading of the expansion: (phi, F) share one parity, (psi, psibar) the
/// opposite one. A bosonic superfield has even phi, a fermionic one odd.
inline Grassmann assemble_components(const Components& c, const ThetaSpace& sp) {
  for (const Grassmann* g : {&c.phi, &c.F, &c.psi, &c.psibar})
    if (parity(*g) == Parity::Inhomogeneous)
      throw std::invalid_argument("superfield: component grading violation");
  int diag = -1, off = -1;
  for (const Grassmann* g : {&c.phi, &c.F})
    if (!exactly_zero(*g)) diag = is_even(*g) ? 0 : 1;
  for (const Grassmann* g : {&c.psi, &c.psibar})
    if (!exactly_zero(*g)) off = is_even(*g) ? 0 : 1;
  if (!exactly_zero(c.phi) && !exactly_zero(c.F) && is_even(c.phi) != is_even(c.F))
    throw std::invalid_argument("superfield: component grading violation");
  if (!exactly_zero(c.psi) && !exactly_zero(c.psibar) && is_even(c.psi) != is_even(c.psibar))
    throw std::invalid_argument("superfield: component grading violation");
  if (diag >= 0 && off >= 0 && diag == off)
    throw std::invalid_argument("superfield: component grading violation");
  const Cplx i(0.0, 1.0);
  return lift(c.phi, sp) - i * (sp.theta1() * lift(c.psibar, sp)) + i * (sp.theta2() * lift(c.psi, sp)) -
         i * (sp.theta1() * sp.theta2() * lift(c.F, sp));
}

inline Components disassemble(const Grassmann& X, const ThetaSpace& sp) {
  const Cplx i(0.0, 1.0);
  return {theta_sector(X, false, false, sp), i * theta_sector(X, true, false, sp),
          -i * theta_sector(X, false, true, sp), i * theta_sector(X, true, true, sp)};
}

/// A superfield together with the lightcone derivatives its jet carries.
/// Keys are (a, b) meaning d_+^a d_-^b of the assembled element.
struct Superfield {
  ThetaSpace space;
  std::map<std::pair<int, int>, Grassmann> jet;

  const Grassmann& at(int a, int b) const {
    auto it = jet.find({a, b});
    if (it == jet.end()) throw std::invalid_argument("superfield: missing derivative data");
    return it->second;
  }
  const Grassmann& value() const { return at(0, 0); }
};

/// D+ = -i d_theta1 + theta1 d_+ ; D- = +i d_theta2 + theta2 d_- .
/// Each derivative order of the result needs one higher +/- order of the
/// input, so the output jet is one order shallower in that direction.
inline Superfield superD(int sign, const Superfield& X) {
  Superfield r;
  r.space = X.space;
  const Cplx i(0.0, 1.0);
  for (const auto& [ord, val] : X.jet) {
    auto [a, b] = ord;
    auto next = X.jet.find(sign > 0 ? std::pair{a + 1, b} : std::pair{a, b + 1});
    if (next == X.jet.end()) continue;
    if (sign > 0)
      r.jet[{a, b}] = -i * left_derivative(val, X.space.t1_bit()) + X.space.theta1() * next->second;
    else
      r.jet[{a, b}] = i * left_derivative(val, X.space.t2_bit()) + X.space.theta2() * next->second;
  }
  if (r.jet.empty()) throw std::invalid_argument("superfield: missing derivative data");
  return r;
}

/// Jet of component tuples for a superfield: value, d+, d-, d+d- and
/// optionally d+d+, d-d-.
struct SuperJet {
  ThetaSpace space;
  Components val, dp, dm, dpm;
  std::optional<Components> dpp, dmm;
};

inline Superfield assemble(const SuperJet& j) {
  Superfield X;
  X.space = j.space;
  X.jet[{0, 0}] = assemble_components(j.val, j.space);
  X.jet[{1, 0}] = assemble_components(j.dp, j.space);
  X.jet[{0, 1}] = assemble_components(j.dm, j.space);
  X.jet[{1, 1}] = assemble_components(j.dpm, j.space);
  if (j.dpp) X.jet[{2, 0}] = assemble_components(*j.dpp, j.space);
  if (j.dmm) X.jet[{0, 2}] = assemble_components(*j.dmm, j.space);
  return X;
}

/// Residual of D+D-X = i m sinh X evaluated on the jet.
inline Grassmann sshg_super_residual(const SuperJet& j, double m) {
  Superfield X = assemble(j);
  Grassmann lhs = superD(+1, superD(-1, X)).value();
  return lhs - Cplx(0.0, m) * sinh_of(X.value());
}

/// Linear combinations keep only the jet orders both operands carry.
inline Superfield operator+(const Superfield& X, const Superfield& Y) {
  Superfield r;
  r.space = X.space;
  for (const auto& [ord, val] : X.jet) {
    auto yi = Y.jet.find(ord);
    if (yi != Y.jet.end()) r.jet[ord] = val + yi->second;
  }
  return r;
}

inline Superfield operator-(const Superfield& X, const Superfield& Y) {
  Superfield r;
  r.space = X.space;
  for (const auto& [ord, val] : X.jet) {
    auto yi = Y.jet.find(ord);
    if (yi != Y.jet.end()) r.jet[ord] = val - yi->second;
  }
  return r;
}

inline Superfield operator*(const Cplx& c, const Superfield& X) {
  Superfield r;
  r.space = X.space;
  for (const auto& [ord, val] : X.jet) r.jet[ord] = c * val;
  return r;
}

/// Pointwise product of two superfields with jets (Leibniz in d_+/d_-).
inline Superfield superfield_product(const Superfield& X, const Superfield& Y) {
  Superfield r;
  r.space = X.space;
  for (const auto& [ord, _] : X.jet) {
    auto [a, b] = ord;
    Grassmann acc(X.space.total());
    bool complete = true;
    for (int p = 0; p <= a && complete; ++p)
      for (int q = 0; q <= b && complete; ++q) {
        auto xi = X.jet.find({p, q});
        auto yi = Y.jet.find({a - p, b - q});
        if (xi == X.jet.end() || yi == Y.jet.end()) { complete = false; break; }
        double binom = 1.0;
        for (int k = 0; k < p; ++k) binom *= double(a - k) / (k + 1);
        for (int k = 0; k < q; ++k) binom *= double(b - k) / (k + 1);
        acc += binom * (xi->second * yi->second);
      }
    if (complete) r.jet[{a, b}] = acc;
  }
  return r;
}

}  // namespace sshg
