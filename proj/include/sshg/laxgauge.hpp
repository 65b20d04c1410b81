#pragma once

// Lax pair for the supersymmetric sinh-Gordon model, the defect matrix K
// intertwining the linear problems on the two sides of a type-II defect, and
// residual checks for the gauge equation d+- K = K A(1)+- - A(2)+- K,
// order by order in the spectral parameter.
//
// The spectral parameter is kept formal: matrices are Laurent polynomials in
// lambda^{1/2} with Grassmann-valued coefficients, stored per half-power, so
// every identity is checked coefficient-wise rather than at sampled lambda.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sshg/backlund.hpp"
#include "sshg/defect.hpp"

namespace sshg {

// sqrt(i), pinned to the principal branch e^{i pi/4}.
inline const Cplx kSqrtI = Cplx(M_SQRT1_2, M_SQRT1_2);

/// 3x3 matrix of Laurent polynomials in lambda^{1/2}, powers -3/2 .. +3/2 in
/// units of lambda^{1/2} plus the lambda^{+-1} block occupied by the Lax
/// matrices (stored range is -3 .. +3 half-powers).  Rows and columns are
/// graded (even, even, odd); the helper grading_ok checks that every
/// coefficient carries the parity of its slot.
template <class S>
struct GradedLaurentMatrixT {
  static constexpr int kMinHalf = -3;
  static constexpr int kMaxHalf = 3;
  static constexpr int kSlots = kMaxHalf - kMinHalf + 1;

  int n = 0;
  std::vector<GrassmannT<S>> coef;  // [ (i*3 + j)*kSlots + (p - kMinHalf) ]

  explicit GradedLaurentMatrixT(int gens)
      : n(gens), coef(9 * kSlots, GrassmannT<S>(gens)) {}

  GrassmannT<S>& at(int i, int j, int half_power) {
    check_index(i, j, half_power);
    return coef[(i * 3 + j) * kSlots + (half_power - kMinHalf)];
  }
  const GrassmannT<S>& at(int i, int j, int half_power) const {
    check_index(i, j, half_power);
    return coef[(i * 3 + j) * kSlots + (half_power - kMinHalf)];
  }

  static void check_index(int i, int j, int half_power) {
    if (i < 0 || i > 2 || j < 0 || j > 2 || half_power < kMinHalf || half_power > kMaxHalf)
      throw std::out_of_range("graded Laurent matrix: index out of range");
  }

  GradedLaurentMatrixT operator+(const GradedLaurentMatrixT& o) const {
    GradedLaurentMatrixT r(n);
    for (size_t k = 0; k < coef.size(); ++k) r.coef[k] = coef[k] + o.coef[k];
    return r;
  }
  GradedLaurentMatrixT operator-(const GradedLaurentMatrixT& o) const {
    GradedLaurentMatrixT r(n);
    for (size_t k = 0; k < coef.size(); ++k) r.coef[k] = coef[k] - o.coef[k];
    return r;
  }
  /// Matrix product with convolution over half-powers.  Throws if a nonzero
  /// coefficient would land outside the stored power range.
  GradedLaurentMatrixT operator*(const GradedLaurentMatrixT& o) const {
    GradedLaurentMatrixT r(n);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int p = kMinHalf; p <= kMaxHalf; ++p)
            for (int q = kMinHalf; q <= kMaxHalf; ++q) {
              const GrassmannT<S>& x = at(i, k, p);
              const GrassmannT<S>& y = o.at(k, j, q);
              GrassmannT<S> term = x * y;
              if (max_abs(term) == 0.0) continue;
              if (p + q < kMinHalf || p + q > kMaxHalf)
                throw std::domain_error("graded Laurent matrix: product power out of range");
              r.at(i, j, p + q) += term;
            }
    return r;
  }
};

using GradedLaurentMatrix = GradedLaurentMatrixT<Cplx>;

template <class S>
double max_abs(const GradedLaurentMatrixT<S>& mat) {
  double r = 0.0;
  for (const auto& c : mat.coef) r = std::max(r, max_abs(c));
  return r;
}

/// Rows/columns are graded (even, even, odd): every lambda-coefficient of
/// entry (i, j) must carry parity(i) xor parity(j).
inline bool grading_ok(const GradedLaurentMatrix& mat) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const bool odd = (i == 2) != (j == 2);
      for (int p = mat.kMinHalf; p <= mat.kMaxHalf; ++p) {
        const Grassmann& c = mat.at(i, j, p);
        if (max_abs(c) == 0.0) continue;
        if (odd ? !is_odd(c) : !is_even(c)) return false;
      }
    }
  return true;
}

// ---------------------------------------------------------------------------
// Lax pair.  The lightcone flows of the linear problem are
// d+- Psi = -A+- Psi with the matrices below; A+ carries d+ phi and psibar,
// A- carries phi and psi.

template <class S>
GradedLaurentMatrixT<S> lax_plus_fields(const GrassmannT<S>& dp_phi, const GrassmannT<S>& psibar) {
  const int n = dp_phi.generators();
  GradedLaurentMatrixT<S> A(n);
  const GrassmannT<S> one = GrassmannT<S>::scalar(n, 1.0);
  A.at(0, 0, 1) = one;
  A.at(0, 0, 0) = Cplx(-1.0) * dp_phi;
  A.at(0, 1, 0) = Cplx(-1.0) * one;
  A.at(0, 2, 0) = kSqrtI * psibar;
  A.at(1, 0, 2) = Cplx(-1.0) * one;
  A.at(1, 1, 1) = one;
  A.at(1, 1, 0) = dp_phi;
  A.at(1, 2, 1) = kSqrtI * psibar;
  A.at(2, 0, 1) = kSqrtI * psibar;
  A.at(2, 1, 0) = kSqrtI * psibar;
  A.at(2, 2, 1) = Cplx(2.0) * one;
  return A;
}

template <class S>
GradedLaurentMatrixT<S> lax_minus_fields(const GrassmannT<S>& phi, const GrassmannT<S>& psi,
                                         double m) {
  const int n = phi.generators();
  GradedLaurentMatrixT<S> A(n);
  const GrassmannT<S> one = GrassmannT<S>::scalar(n, 1.0);
  const Cplx m24(m * m / 4.0);
  const Cplx sm2 = kSqrtI * (m / 2.0);
  const GrassmannT<S> ep = exp_of(phi), em = exp_of(Cplx(-1.0) * phi);
  A.at(0, 0, -1) = m24 * one;
  A.at(0, 1, -2) = -m24 * (ep * ep);
  A.at(0, 2, -1) = sm2 * (psi * ep);
  A.at(1, 0, 0) = -m24 * (em * em);
  A.at(1, 1, -1) = m24 * one;
  A.at(1, 2, 0) = sm2 * (psi * em);
  A.at(2, 0, 0) = -sm2 * (psi * em);
  A.at(2, 1, -1) = -sm2 * (psi * ep);
  A.at(2, 2, -1) = Cplx(m * m / 2.0) * one;
  return A;
}

inline GradedLaurentMatrix lax_plus(const BulkPoint& p) {
  return lax_plus_fields(dplus(p.dx_phi, p.dt_phi), p.psibar);
}
inline GradedLaurentMatrix lax_minus(const BulkPoint& p, double m) {
  return lax_minus_fields(p.phi, p.psi, m);
}

// ---------------------------------------------------------------------------
// Defect matrix K = alpha + lambda^{-1/2} beta + lambda^{1/2} gamma.

template <class S>
struct KPartsT {
  std::array<std::array<GrassmannT<S>, 3>, 3> a, b, g;
};
using KParts = KPartsT<Cplx>;

/// The eleven closed-form entries, with b12 = m sigma c11 and
/// b11 = (m sigma / 4) b12 derived from the single free constant c11.
template <class S>
KPartsT<S> defect_k_parts(const GrassmannT<S>& phip, const GrassmannT<S>& phim,
                          const GrassmannT<S>& lambda0, const GrassmannT<S>& f1,
                          const GrassmannT<S>& f1t, Cplx sigma, Cplx tau, double m, Cplx c11) {
  const int n = phip.generators();
  const Cplx i(0.0, 1.0);
  const Cplx ms = m * sigma;
  const Cplx b12 = ms * c11;
  const Cplx b11 = (ms / 4.0) * b12;
  const Cplx rmp = std::sqrt(ms);
  const Cplx ct = std::cosh(tau);
  const GrassmannT<S> one = GrassmannT<S>::scalar(n, 1.0);

  const GrassmannT<S> q = phip - lambda0;
  const GrassmannT<S> eq = exp_of(q), emq = exp_of(Cplx(-1.0) * q);
  const GrassmannT<S> eqh = exp_of(Cplx(0.5) * q), emqh = exp_of(Cplx(-0.5) * q);
  const GrassmannT<S> efm = exp_of(phim), emfm = exp_of(Cplx(-1.0) * phim);
  const GrassmannT<S> efmh = exp_of(Cplx(0.5) * phim), emfmh = exp_of(Cplx(-0.5) * phim);
  const GrassmannT<S> sh = sinh_of(Cplx(0.5) * phim), ch = cosh_of(Cplx(0.5) * phim);

  KPartsT<S> K;
  for (auto* block : {&K.a, &K.b, &K.g})
    for (auto& row : *block) row.fill(GrassmannT<S>(n));

  const GrassmannT<S> aux_ct = ct * f1t - sh * f1;  // cosh tau f1t - sinh(phi-/2) f1
  const GrassmannT<S> aux_sh = sh * f1t + ct * f1;  // sinh(phi-/2) f1t + cosh tau f1

  K.a[0][0] = (i / 2.0) * ms * c11 * (emfmh * f1 * f1t);
  K.a[1][1] = (i / 2.0) * ms * c11 * (efmh * f1 * f1t);
  K.a[2][2] = -ms * c11 * (i * (ch * f1t * f1) + ct * one);
  K.a[0][2] = -kSqrtI * rmp * c11 * (eqh * f1);
  K.a[2][1] = kSqrtI * rmp * c11 * (eqh * f1);
  K.a[1][2] = (2.0 * kSqrtI * b11 / rmp) * (emqh * efmh * aux_ct);
  K.a[2][0] = (2.0 * kSqrtI * b11 / rmp) * (emqh * emfmh * aux_ct);

  K.b[0][0] = b11 * emfm;
  K.b[1][1] = b11 * efm;
  K.b[2][2] = b11 * one;
  K.b[0][1] = b12 * eq;
  K.b[0][2] = (2.0 * kSqrtI * b11 / rmp) * (eqh * emfmh * f1t);
  K.b[2][1] = (2.0 * kSqrtI * b11 / rmp) * (eqh * efmh * f1t);

  K.g[0][0] = c11 * one;
  K.g[1][1] = c11 * one;
  K.g[2][2] = c11 * one;
  K.g[1][0] = b12 * (emq * (sh * sh + (ct * ct) * one + (i * ct) * (ch * f1 * f1t)));
  K.g[1][2] = -kSqrtI * rmp * c11 * (emqh * aux_sh);
  K.g[2][0] = kSqrtI * rmp * c11 * (emqh * aux_sh);

  return K;
}

template <class S>
GradedLaurentMatrixT<S> assemble_K(const KPartsT<S>& parts, int n) {
  GradedLaurentMatrixT<S> K(n);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      K.at(i, j, 0) = parts.a[i][j];
      K.at(i, j, -1) = parts.b[i][j];
      K.at(i, j, 1) = parts.g[i][j];
    }
  return K;
}

inline GradedLaurentMatrix defect_matrix_K(const Grassmann& phip, const Grassmann& phim,
                                           const Grassmann& lambda0, const Grassmann& f1,
                                           const Grassmann& f1t, Cplx sigma, Cplx tau, double m,
                                           Cplx c11 = Cplx(1.0)) {
  if (c11 == Cplx(0.0)) throw std::invalid_argument("defect matrix: c11 must be nonzero");
  return assemble_K(defect_k_parts(phip, phim, lambda0, f1, f1t, sigma, tau, m, c11),
                    phip.generators());
}

inline GradedLaurentMatrix defect_matrix_K(const DefectState& st, Cplx sigma, Cplx tau, double m,
                                           Cplx c11 = Cplx(1.0)) {
  return defect_matrix_K(st.side1.phi + st.side2.phi, st.side1.phi - st.side2.phi, st.lambda0,
                         st.f1, st.f1t, sigma, tau, m, c11);
}

// ---------------------------------------------------------------------------
// First-order jets at the defect point and the gauge-equation residual.

struct LaxJet {
  Grassmann phi, dp_phi, dm_phi, psi, psibar;
};

struct GaugeJet {
  LaxJet s1, s2;
  Grassmann lambda0, f1, f1t;
  Grassmann dp_lambda0, dm_lambda0, dp_f1, dm_f1, dp_f1t, dm_f1t;
};

/// Values of all constrained derivatives (and of psi-, psibar-) dictated by
/// the two-parameter frozen-field relations at a point, given the free data:
/// fields, psi+, psibar+, and the unconstrained d+- phi+.
struct BacklundFlow {
  Grassmann dp_phim, dm_phim, dp_lambda0, dm_lambda0;
  Grassmann psim, psibm;
  Grassmann dp_f1, dm_f1, dp_f1t, dm_f1t;
};

inline BacklundFlow backlund_flow(const Grassmann& phi1, const Grassmann& phi2,
                                  const Grassmann& lambda0, const Grassmann& f1,
                                  const Grassmann& f1t, const Grassmann& psip,
                                  const Grassmann& psibp, const Grassmann& dm_phip,
                                  const FusedParams& fp) {
  const int n = phi1.generators();
  const Grassmann zero(n);
  BulkPoint p1{phi1, 0.5 * psip, 0.5 * psibp};
  BulkPoint p2{phi2, 0.5 * psip, 0.5 * psibp};
  p1.dx_phi = p1.dt_phi = zero;
  p2.dx_phi = p2.dt_phi = zero;
  AuxState aux{lambda0, f1, f1t};
  aux.dp_lambda0 = aux.dm_lambda0 = zero;
  aux.dp_f1 = aux.dm_f1 = aux.dp_f1t = aux.dm_f1t = zero;
  // With every derivative slot zeroed and psi- = psibar- = 0, each residual
  // equals minus the right-hand side of its relation.
  const std::array<Grassmann, 10> r = fused_backlund_residuals(p1, p2, aux, fp);
  BacklundFlow flow{-r[2],          -r[3],          -r[1], dm_phip + r[0], -r[4],
                    -r[5],          -r[6],          -r[7], -r[8],          -r[9]};
  return flow;
}

/// Assembles a gauge jet whose derivative content is exactly the frozen-field
/// flow: free data are the two boundary fields, the auxiliaries, psi+/psibar+
/// and the unconstrained lightcone derivatives of phi+.
inline GaugeJet make_backlund_jet(const Grassmann& phi1, const Grassmann& phi2,
                                  const Grassmann& lambda0, const Grassmann& f1,
                                  const Grassmann& f1t, const Grassmann& psip,
                                  const Grassmann& psibp, const Grassmann& dp_phip,
                                  const Grassmann& dm_phip, const FusedParams& fp) {
  const BacklundFlow fl = backlund_flow(phi1, phi2, lambda0, f1, f1t, psip, psibp, dm_phip, fp);
  GaugeJet j;
  j.s1 = LaxJet{phi1, 0.5 * (dp_phip + fl.dp_phim), 0.5 * (dm_phip + fl.dm_phim),
                0.5 * (psip + fl.psim), 0.5 * (psibp + fl.psibm)};
  j.s2 = LaxJet{phi2, 0.5 * (dp_phip - fl.dp_phim), 0.5 * (dm_phip - fl.dm_phim),
                0.5 * (psip - fl.psim), 0.5 * (psibp - fl.psibm)};
  j.lambda0 = lambda0;
  j.f1 = f1;
  j.f1t = f1t;
  j.dp_lambda0 = fl.dp_lambda0;
  j.dm_lambda0 = fl.dm_lambda0;
  j.dp_f1 = fl.dp_f1;
  j.dm_f1 = fl.dm_f1;
  j.dp_f1t = fl.dp_f1t;
  j.dm_f1t = fl.dm_f1t;
  return j;
}

namespace lax_detail {

inline GrassmannD lift(const Grassmann& value, const Grassmann& deriv) {
  const int n = value.generators();
  GrassmannD r(n);
  for (unsigned k = 0; k < r.size(); ++k) r[k] = Dual{value[k], deriv[k]};
  return r;
}

/// K parts together with their lightcone derivatives, via dual-number
/// evaluation of the closed forms along the jet.
struct KJetParts {
  KParts base, dp, dm;
};

inline KJetParts k_jet_parts(const GaugeJet& j, Cplx sigma, Cplx tau, double m, Cplx c11) {
  const Grassmann phip = j.s1.phi + j.s2.phi, phim = j.s1.phi - j.s2.phi;
  const Grassmann dp_phip = j.s1.dp_phi + j.s2.dp_phi, dp_phim = j.s1.dp_phi - j.s2.dp_phi;
  const Grassmann dm_phip = j.s1.dm_phi + j.s2.dm_phi, dm_phim = j.s1.dm_phi - j.s2.dm_phi;
  KJetParts out{defect_k_parts(phip, phim, j.lambda0, j.f1, j.f1t, sigma, tau, m, c11), {}, {}};
  auto directional = [&](const Grassmann& dphip, const Grassmann& dphim, const Grassmann& dl0,
                         const Grassmann& df1, const Grassmann& df1t) {
    KPartsT<Dual> d =
        defect_k_parts(lift(phip, dphip), lift(phim, dphim), lift(j.lambda0, dl0),
                       lift(j.f1, df1), lift(j.f1t, df1t), sigma, tau, m, c11);
    KParts r;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        r.a[a][b] = dual_deriv(d.a[a][b]);
        r.b[a][b] = dual_deriv(d.b[a][b]);
        r.g[a][b] = dual_deriv(d.g[a][b]);
      }
    return r;
  };
  out.dp = directional(dp_phip, dp_phim, j.dp_lambda0, j.dp_f1, j.dp_f1t);
  out.dm = directional(dm_phip, dm_phim, j.dm_lambda0, j.dm_f1, j.dm_f1t);
  return out;
}

}  // namespace lax_detail

/// Residuals of d+- K - K A(1)+- + A(2)+- K per half-power of lambda;
/// first element is the d+ equation, second the d- equation.
inline std::pair<GradedLaurentMatrix, GradedLaurentMatrix> gauge_residual(
    const GaugeJet& j, Cplx sigma, Cplx tau, double m, Cplx c11 = Cplx(1.0)) {
  const int n = j.lambda0.generators();
  const lax_detail::KJetParts kj = lax_detail::k_jet_parts(j, sigma, tau, m, c11);
  const GradedLaurentMatrix K = assemble_K(kj.base, n);
  const GradedLaurentMatrix dpK = assemble_K(kj.dp, n);
  const GradedLaurentMatrix dmK = assemble_K(kj.dm, n);
  const GradedLaurentMatrix A1p = lax_plus_fields(j.s1.dp_phi, j.s1.psibar);
  const GradedLaurentMatrix A2p = lax_plus_fields(j.s2.dp_phi, j.s2.psibar);
  const GradedLaurentMatrix A1m = lax_minus_fields(j.s1.phi, j.s1.psi, m);
  const GradedLaurentMatrix A2m = lax_minus_fields(j.s2.phi, j.s2.psi, m);
  return {dpK - (K * A1p - A2p * K), dmK - (K * A1m - A2m * K)};
}

/// Zero-curvature residual d- A+ - d+ A- + A- A+ - A+ A- of the bulk Lax
/// pair on a second-order jet of a bulk solution.
inline GradedLaurentMatrix zero_curvature_residual(const BulkPoint& p, double m) {
  using lax_detail::lift;
  const Grassmann dp_phi = dplus(p.dx_phi, p.dt_phi);
  // d+ d- phi = (dxx - dtt)/4.
  const Grassmann dpdm_phi =
      0.25 * (p.need(p.dxx_phi, "dxx phi") - p.need(p.dtt_phi, "dtt phi"));
  const Grassmann dm_psibar = dminus(p.dx_psibar, p.dt_psibar);
  const Grassmann dp_psi = dplus(p.dx_psi, p.dt_psi);

  GradedLaurentMatrixT<Dual> Ap = lax_plus_fields(lift(dp_phi, dpdm_phi), lift(p.psibar, dm_psibar));
  GradedLaurentMatrixT<Dual> Am = lax_minus_fields(lift(p.phi, dp_phi), lift(p.psi, dp_psi), m);

  const int n = p.phi.generators();
  GradedLaurentMatrix dmAp(n), dpAm(n), Apb(n), Amb(n);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int q = GradedLaurentMatrix::kMinHalf; q <= GradedLaurentMatrix::kMaxHalf; ++q) {
        dmAp.at(i, j, q) = dual_deriv(Ap.at(i, j, q));
        dpAm.at(i, j, q) = dual_deriv(Am.at(i, j, q));
        Apb.at(i, j, q) = dual_value(Ap.at(i, j, q));
        Amb.at(i, j, q) = dual_value(Am.at(i, j, q));
      }
  return dmAp - dpAm + Amb * Apb - Apb * Amb;
}

// ---------------------------------------------------------------------------
// The full list of lambda-expansion relations of the gauge equation, each as
// a named residual.  Algebraic relations (the lambda^{+-3/2} and lambda^{+-1}
// sectors plus the entry constraints) hold for the constructed K at any
// point; the differential relations (lambda^0 and lambda^{+-1/2} sectors)
// hold when the jet satisfies the frozen-field relations.

inline std::vector<std::pair<std::string, Grassmann>> expanded_relation_residuals(
    const GaugeJet& j, Cplx sigma, Cplx tau, double m, Cplx c11 = Cplx(1.0)) {
  const Cplx i(0.0, 1.0);
  const Cplx si = kSqrtI;
  const Cplx m24(m * m / 4.0);
  const Cplx sm2 = si * (m / 2.0);
  const Cplx tsim = 2.0 * si / m;
  const int n = j.lambda0.generators();
  const Grassmann one = Grassmann::scalar(n, 1.0);

  const lax_detail::KJetParts kj = lax_detail::k_jet_parts(j, sigma, tau, m, c11);
  const auto& a = kj.base.a;
  const auto& b = kj.base.b;
  const auto& g = kj.base.g;
  const auto& dpa = kj.dp.a;
  const auto& dpb = kj.dp.b;
  const auto& dpg = kj.dp.g;
  const auto& dma = kj.dm.a;
  const auto& dmb = kj.dm.b;
  const auto& dmg = kj.dm.g;

  const Grassmann phip = j.s1.phi + j.s2.phi, phim = j.s1.phi - j.s2.phi;
  const Grassmann dp_phip = j.s1.dp_phi + j.s2.dp_phi, dp_phim = j.s1.dp_phi - j.s2.dp_phi;
  const Grassmann& ps1 = j.s1.psi;
  const Grassmann& ps2 = j.s2.psi;
  const Grassmann& pb1 = j.s1.psibar;
  const Grassmann& pb2 = j.s2.psibar;
  const Grassmann psibm = pb1 - pb2;

  auto E = [&](const Grassmann& x) { return exp_of(x); };
  const Grassmann efp = E(phip), emfp = E(Cplx(-1.0) * phip);
  const Grassmann efph = E(Cplx(0.5) * phip), emfph = E(Cplx(-0.5) * phip);
  const Grassmann efm = E(phim), emfm = E(Cplx(-1.0) * phim);
  const Grassmann efmh = E(Cplx(0.5) * phim), emfmh = E(Cplx(-0.5) * phim);
  const Grassmann eppm = E(Cplx(0.5) * (phip + phim)), emppm = E(Cplx(-0.5) * (phip + phim));
  const Grassmann epmm = E(Cplx(0.5) * (phip - phim)), empmm = E(Cplx(-0.5) * (phip - phim));

  std::vector<std::pair<std::string, Grassmann>> r;
  auto add = [&](const char* name, const Grassmann& res) { r.emplace_back(name, res); };

  // lambda^{+3/2}
  add("g12", g[0][1]);
  add("g13", g[0][2]);
  add("g32", g[2][1]);
  add("g11-g22", g[0][0] - g[1][1]);
  // lambda^{+1}
  add("a12", a[0][1] - si * (g[0][2] * pb1));
  add("g13-rel", g[0][2] + si * (g[0][1] * pb1));
  add("g32-rel", g[2][1] + si * (g[0][1] * pb2));
  add("a11-a22", a[0][0] - a[1][1] - si * (pb2 * g[2][0] - g[1][2] * pb1));
  add("a13+g23", a[0][2] + g[1][2] - si * (pb2 * g[2][2] - g[0][0] * pb1));
  add("g31+a32", g[2][0] + a[2][1] - si * (pb1 * g[2][2] - g[0][0] * pb2));
  // lambda^{-3/2}
  add("b21", b[1][0]);
  add("b23", b[1][2]);
  add("b31", b[2][0]);
  add("b22-b11e2f", b[1][1] - b[0][0] * efm * efm);
  // lambda^{-1}
  add("a21", a[1][0] - tsim * (ps2 * b[2][0] * empmm));
  add("b23-rel", b[1][2] + tsim * (b[1][0] * ps1 * eppm));
  add("b31-rel", b[2][0] - tsim * (ps2 * b[1][0] * epmm));
  add("a11e-a22e (alpha)", a[0][0] * efm - a[1][1] * emfm -
                               tsim * (efph * (a[1][2] * ps1 * emfmh + efmh * ps2 * a[2][0])));
  add("a11e-a22e (beta)", a[0][0] * efm - a[1][1] * emfm +
                              tsim * (emfph * (ps2 * b[2][1] * emfmh + efmh * b[0][2] * ps1)));
  add("a31+b32", a[2][0] * efp * efm + b[2][1] +
                     tsim * (efph * (b[2][2] * ps1 * efmh - b[1][1] * ps2 * emfmh)));
  add("a23+b13", a[1][2] * efp * emfm + b[0][2] +
                     tsim * (efph * (b[0][0] * ps1 * efmh - b[2][2] * ps2 * emfmh)));
  // lambda^0, d+ sector
  add("dp a11", dpa[0][0] + a[0][0] * dp_phim - si * (b[0][2] * pb1 - pb2 * a[2][0]));
  add("dp a13", dpa[0][2] - Cplx(0.5) * (a[0][2] * (dp_phip - dp_phim)) - b[0][2] - a[1][2] +
                    si * (pb2 * a[2][2]) - si * ((a[0][0] + b[0][1]) * pb1));
  add("dp a23", dpa[1][2] + Cplx(0.5) * (a[1][2] * (dp_phip - dp_phim)) -
                    si * (b[1][1] * pb1 - pb2 * b[2][2]));
  add("dp a22", dpa[1][1] - a[1][1] * dp_phim - si * (a[1][2] * pb1 - pb2 * b[2][1]));
  add("dp a31", dpa[2][0] + Cplx(0.5) * (a[2][0] * (dp_phip + dp_phim)) -
                    si * (b[2][2] * pb1 - pb2 * b[0][0]));
  add("dp a32", dpa[2][1] - Cplx(0.5) * (a[2][1] * (dp_phip + dp_phim)) + a[2][0] + b[2][1] -
                    si * (a[2][2] * pb1) + si * (pb2 * (b[0][1] + a[1][1])));
  add("dp a33", dpa[2][2] - si * ((b[2][1] + a[2][0]) * pb1) + si * (pb2 * (a[1][2] + b[0][2])));
  // lambda^0, d- sector
  add("dm a11", dma[0][0] + sm2 * (emfmh * (a[0][2] * ps1 * emfph + efph * ps2 * g[2][0])));
  add("dm a13", dma[0][2] + sm2 * (efph * (emfmh * ps2 * g[2][2] - g[0][0] * ps1 * efmh)));
  add("dm a22", dma[1][1] + sm2 * (efmh * (emfph * ps2 * a[2][1] + g[1][2] * ps1 * efph)));
  add("dm a23", dma[1][2] - m24 * (g[1][2] + a[0][2] * emfp * efm) -
                    sm2 * ((g[1][0] * eppm + a[1][1] * emppm) * ps1) + sm2 * (empmm * ps2 * a[2][2]));
  add("dm a31", dma[2][0] + m24 * (g[2][0] + a[2][1] * emfp * emfm) -
                    sm2 * (ps2 * (empmm * a[0][0] + epmm * g[1][0])) + sm2 * (a[2][2] * ps1 * emppm));
  add("dm a32", dma[2][1] + sm2 * (efph * (g[2][2] * ps1 * efmh - emfmh * ps2 * g[0][0])));
  add("dm a33", dma[2][2] - sm2 * ((g[2][0] * eppm + a[2][1] * emppm) * ps1) -
                    sm2 * (ps2 * (empmm * a[0][2] + epmm * g[1][2])));
  // lambda^{-1/2}, d- sector
  add("dm b11", dmb[0][0] - m24 * (emfm * (g[1][0] * efp - b[0][1] * emfp)) +
                    sm2 * (emfmh * (b[0][2] * ps1 * emfph + efph * ps2 * a[2][0])));
  add("dm b12", dmb[0][1] - m24 * (g[0][0] * efp * (emfm - efm)) +
                    sm2 * (efph * (a[0][2] * ps1 * efmh + emfmh * ps2 * a[2][1])));
  add("dm b13", dmb[0][2] - m24 * (g[1][2] * efp * emfm + a[0][2]) -
                    sm2 * ((a[0][0] * eppm + b[0][1] * emppm) * ps1) + sm2 * (epmm * ps2 * a[2][2]));
  add("dm b22", dmb[1][1] - m24 * (efm * (b[0][1] * emfp - g[1][0] * efp)) +
                    sm2 * (efmh * (a[1][2] * ps1 * efph + emfph * ps2 * b[2][1])));
  add("dm b32", dmb[2][1] + m24 * (a[2][1] + g[2][0] * efp * efm) -
                    sm2 * (ps2 * (epmm * a[1][1] + empmm * b[0][1])) + sm2 * (a[2][2] * ps1 * eppm));
  add("dm b33", dmb[2][2] - sm2 * ((b[2][1] * emppm + a[2][0] * eppm) * ps1) -
                    sm2 * (ps2 * (empmm * b[0][2] + epmm * a[1][2])));
  // lambda^{-1/2}, d+ sector
  add("dp b11", dpb[0][0] + b[0][0] * dp_phim);
  add("dp b12", dpb[0][1] - b[0][1] * dp_phip - b[1][1] + b[0][0] -
                    si * (b[0][2] * pb1 - pb2 * b[2][1]));
  add("dp b13", dpb[0][2] - Cplx(0.5) * (b[0][2] * (dp_phip - dp_phim)) -
                    si * (b[0][0] * pb1 - pb2 * b[2][2]));
  add("dp b22", dpb[1][1] - b[1][1] * dp_phim);
  add("dp b32", dpb[2][1] - Cplx(0.5) * (b[2][1] * (dp_phip + dp_phim)) -
                    si * (b[2][2] * pb1 - pb2 * b[1][1]));
  add("dp b33", dpb[2][2]);
  // lambda^{+1/2}, d- sector
  add("dm g11", dmg[0][0]);
  add("dm g21", dmg[1][0] - m24 * (g[0][0] * emfp * (efm - emfm)) +
                    sm2 * (emfph * (g[1][2] * ps1 * emfmh + efmh * ps2 * g[2][0])));
  add("dm g23", dmg[1][2] + sm2 * (emfph * (efmh * ps2 * g[2][2] - g[0][0] * ps1 * emfmh)));
  add("dm g31", dmg[2][0] + sm2 * (emfph * (g[2][2] * ps1 * emfmh - efmh * ps2 * g[0][0])));
  add("dm g33", dmg[2][2]);
  // lambda^{+1/2}, d+ sector
  add("dp g11", dpg[0][0] + g[0][0] * dp_phim - g[1][0] + b[0][1] -
                    si * (a[0][2] * pb1 - pb2 * g[2][0]));
  add("dp g22", dpg[1][1] - g[1][1] * dp_phim + g[1][0] - b[0][1] -
                    si * (g[1][2] * pb1 - pb2 * a[2][1]));
  add("dp g21", dpg[1][0] + g[1][0] * dp_phip - b[0][0] + b[1][1] -
                    si * (a[1][2] * pb1 - pb2 * a[2][0]));
  add("dp g23", dpg[1][2] + Cplx(0.5) * (g[1][2] * (dp_phip - dp_phim)) - b[0][2] - a[1][2] +
                    si * (pb2 * a[2][2]) - si * ((a[1][1] + g[1][0]) * pb1));
  add("dp g31", dpg[2][0] + Cplx(0.5) * (g[2][0] * (dp_phip + dp_phim)) + b[2][1] + a[2][0] -
                    si * (a[2][2] * pb1) + si * (pb2 * (a[0][0] + g[1][0])));
  add("dp g33", dpg[2][2] - si * ((a[2][1] + g[2][0]) * pb1) + si * (pb2 * (a[0][2] + g[1][2])));
  // entry identities fixed by the construction
  add("a13+g23 = -sqrt(i) c11 psibar-", a[0][2] + g[1][2] + (si * c11) * psibm);
  add("g31+a32 = sqrt(i) c11 psibar-", g[2][0] + a[2][1] - (si * c11) * psibm);
  add("a13 = -a32", a[0][2] + a[2][1]);
  add("g31 = -g23", g[2][0] + g[1][2]);
  // constants (exact, appended as scalar residuals)
  const Cplx b12c = m * sigma * c11;
  const Cplx b11c = (m * sigma / 4.0) * b12c;
  add("b11 = (m sigma/4) b12", (b11c - (m * sigma / 4.0) * b12c) * one);
  add("b12 = m sigma c11", (b12c - m * sigma * c11) * one);
  return r;
}

}  // namespace sshg
