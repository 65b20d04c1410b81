#pragma once

// Type-II integrable defect for the N=1 supersymmetric sinh-Gordon model:
// defect potentials (four-parameter and fused two-parameter forms), sewing
// conditions at the defect, modified conserved charges, the defect
// supersymmetry transformation, the Poisson-bracket consistency constraints
// on the potentials, the equivalence-shift freedom, and the bosonic /
// purely fermionic limits.

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>

#include "sshg/dual.hpp"
#include "sshg/grassmann.hpp"
#include "sshg/model.hpp"

namespace sshg {

enum class DefectForm { omega, fused };

// Either parametrization can be filled in; `form` arguments select which
// one an operation reads.  The fused form reduces to the four-parameter
// form at tau = i pi/2 with w1 = -sqrt(m/sigma), w2 = sqrt(m sigma).
struct DefectParams {
  Cplx w1{1.0}, w2{1.0};      // four-parameter (omega) family, w3 = m/w1, w4 = m/w2
  Cplx sigma{1.0}, tau{0.0};  // fused (sigma, tau) family
  double m = 1.0;

  static DefectParams from_omega(Cplx w1, Cplx w2, double m) {
    DefectParams p;
    p.w1 = w1;
    p.w2 = w2;
    p.m = m;
    return p;
  }
  static DefectParams from_fused(Cplx sigma, Cplx tau, double m) {
    DefectParams p;
    p.sigma = sigma;
    p.tau = tau;
    p.m = m;
    // omega slots set to the tau = i pi/2 equivalents for convenience.
    p.w1 = -std::sqrt(Cplx(m) / sigma);
    p.w2 = std::sqrt(Cplx(m) * sigma);
    return p;
  }
};

// Boundary values of the two bulk theories at the defect location plus the
// defect degrees of freedom.  Derivative slots are optional; operations
// that need them throw if they are missing.
struct DefectState {
  BulkPoint side1, side2;
  Grassmann lambda0, f1, f1t;
  std::optional<Grassmann> dt_lambda0, dt_f1, dt_f1t;

  static DefectState zero(int n) {
    DefectState s{BulkPoint::zero(n), BulkPoint::zero(n), Grassmann(n), Grassmann(n), Grassmann(n)};
    s.dt_lambda0 = Grassmann(n);
    s.dt_f1 = Grassmann(n);
    s.dt_f1t = Grassmann(n);
    return s;
  }

  const Grassmann& need(const std::optional<Grassmann>& slot, const char* what) const {
    if (!slot) throw std::invalid_argument(std::string("defect state: missing slot ") + what);
    return *slot;
  }
};

template <class S>
struct DefectPotentialsT {
  GrassmannT<S> B0p, B0m, B1p, B1m;
};
using DefectPotentials = DefectPotentialsT<Cplx>;

// Defect potentials as a function of the boundary field combinations
// phi+ = phi1+phi2, phi- = phi1-phi2 (and likewise psi+, psibar+) together
// with the defect fields.  Templated over the scalar so the bosonic
// arguments can carry dual numbers for differentiation.
template <class S>
DefectPotentialsT<S> defect_potentials_fields(const GrassmannT<S>& phip, const GrassmannT<S>& phim,
                                              const GrassmannT<S>& lambda0, const GrassmannT<S>& psip,
                                              const GrassmannT<S>& psibp, const GrassmannT<S>& f1,
                                              const GrassmannT<S>& f1t, const DefectParams& prm,
                                              DefectForm form) {
  const int n = phip.generators();
  const Cplx i(0.0, 1.0);
  const double m = prm.m;
  const GrassmannT<S> one = GrassmannT<S>::scalar(n, S(1.0));

  const GrassmannT<S> q = phip - lambda0;
  const GrassmannT<S> eq = exp_of(q);
  const GrassmannT<S> emq = exp_of(Cplx(-1.0) * q);
  const GrassmannT<S> eqh = exp_of(Cplx(0.5) * q);
  const GrassmannT<S> emqh = exp_of(Cplx(-0.5) * q);
  const GrassmannT<S> el = exp_of(lambda0);
  const GrassmannT<S> eml = exp_of(Cplx(-1.0) * lambda0);
  const GrassmannT<S> elh = exp_of(Cplx(0.5) * lambda0);
  const GrassmannT<S> emlh = exp_of(Cplx(-0.5) * lambda0);
  const GrassmannT<S> sh = sinh_of(Cplx(0.5) * phim);
  const GrassmannT<S> ch = cosh_of(Cplx(0.5) * phim);
  const GrassmannT<S> sh2 = sh * sh;

  DefectPotentialsT<S> out;
  if (form == DefectForm::omega) {
    const Cplx w1 = prm.w1, w2 = prm.w2;
    out.B0p = (w2 * w2) * (emq * sh2) + (m * m / (w1 * w1)) * eq;
    out.B0m = (w1 * w1) * (el * sh2) + (m * m / (w2 * w2)) * eml;
    out.B1p = i * ((m / w1) * (eqh * psibp * f1) - w2 * (emqh * sh * psibp * f1t) -
                   (m * w2 / w1) * (ch * f1 * f1t));
    out.B1m = -i * ((m / w2) * (emlh * psip * f1t) + w1 * (elh * sh * psip * f1) +
                    (m * w1 / w2) * (ch * f1 * f1t));
  } else {
    const Cplx sg = prm.sigma;
    const Cplx ct = std::cosh(prm.tau);
    const Cplx rp = std::sqrt(Cplx(m) * sg);   // sqrt(m sigma)
    const Cplx rs = std::sqrt(Cplx(m) / sg);   // sqrt(m / sigma)
    const GrassmannT<S> angular = sh2 + (ct * ct) * one;
    out.B0p = (m * sg) * (eq + emq * angular);
    out.B0m = (m / sg) * (eml + el * angular);
    out.B1p = -i * rp * ((eqh + ct * emqh) * psibp * f1 + emqh * sh * psibp * f1t) +
              (i * m * sg) * ((one + ct * emq) * ch * f1 * f1t);
    out.B1m = -i * rs * ((emlh + ct * elh) * psip * f1t - elh * sh * psip * f1) +
              (i * m / sg) * ((one + ct * el) * ch * f1 * f1t);
  }
  return out;
}

inline DefectPotentials defect_potentials(const DefectState& s, const DefectParams& prm, DefectForm form) {
  return defect_potentials_fields(s.side1.phi + s.side2.phi, s.side1.phi - s.side2.phi, s.lambda0,
                                  s.side1.psi + s.side2.psi, s.side1.psibar + s.side2.psibar, s.f1,
                                  s.f1t, prm, form);
}

namespace defect_detail {

// Shared scalar/exponential frame for the sewing conditions and charges.
struct Frame {
  Grassmann phip, phim, psip, psibp, psim, psibm;
  Grassmann eq, emq, eqh, emqh, el, eml, elh, emlh, sh, ch, sh2, one;
};

inline Frame make_frame(const DefectState& s) {
  Frame f;
  f.phip = s.side1.phi + s.side2.phi;
  f.phim = s.side1.phi - s.side2.phi;
  f.psip = s.side1.psi + s.side2.psi;
  f.psibp = s.side1.psibar + s.side2.psibar;
  f.psim = s.side1.psi - s.side2.psi;
  f.psibm = s.side1.psibar - s.side2.psibar;
  const Grassmann q = f.phip - s.lambda0;
  f.eq = exp_of(q);
  f.emq = exp_of(Cplx(-1.0) * q);
  f.eqh = exp_of(Cplx(0.5) * q);
  f.emqh = exp_of(Cplx(-0.5) * q);
  f.el = exp_of(s.lambda0);
  f.eml = exp_of(Cplx(-1.0) * s.lambda0);
  f.elh = exp_of(Cplx(0.5) * s.lambda0);
  f.emlh = exp_of(Cplx(-0.5) * s.lambda0);
  f.sh = sinh_of(Cplx(0.5) * f.phim);
  f.ch = cosh_of(Cplx(0.5) * f.phim);
  f.sh2 = f.sh * f.sh;
  f.one = Grassmann::scalar(f.phip.generators(), 1.0);
  return f;
}

}  // namespace defect_detail

// The seven sewing conditions at the defect, as residuals (LHS - RHS):
//   [0]  dx phi+ - dt(phi+ - 2 lambda0) = ...
//   [1]  (dx + dt) phi-                 = ...
//   [2]  (dx - dt) phi-                 = ...
//   [3]  psi-                           = ...
//   [4]  psibar-                        = ...
//   [5]  dt f1                          = ...
//   [6]  dt f1t                         = ...
// Both sides' BulkPoints must carry dx_phi/dt_phi, and the state must carry
// dt_lambda0/dt_f1/dt_f1t.
inline std::array<Grassmann, 7> defect_condition_residuals(const DefectState& s, const DefectParams& prm,
                                                           DefectForm form) {
  const defect_detail::Frame fr = defect_detail::make_frame(s);
  const Cplx i(0.0, 1.0);
  const double m = prm.m;

  const Grassmann dxp = s.side1.need(s.side1.dx_phi, "dx_phi") + s.side2.need(s.side2.dx_phi, "dx_phi");
  const Grassmann dtp = s.side1.need(s.side1.dt_phi, "dt_phi") + s.side2.need(s.side2.dt_phi, "dt_phi");
  const Grassmann dxm = s.side1.need(s.side1.dx_phi, "dx_phi") - s.side2.need(s.side2.dx_phi, "dx_phi");
  const Grassmann dtm = s.side1.need(s.side1.dt_phi, "dt_phi") - s.side2.need(s.side2.dt_phi, "dt_phi");
  const Grassmann dtl0 = s.need(s.dt_lambda0, "dt_lambda0");
  const Grassmann dtf1 = s.need(s.dt_f1, "dt_f1");
  const Grassmann dtf1t = s.need(s.dt_f1t, "dt_f1t");

  const Grassmann shp = sinh_of(fr.phim);  // sinh(phi-)
  std::array<Grassmann, 7> r;
  if (form == DefectForm::omega) {
    const Cplx w1 = prm.w1, w2 = prm.w2;
    const Cplx cw = w1 / w2 + w2 / w1;
    r[0] = dxp - dtp + Cplx(2.0) * dtl0 + (w1 * w1) * (fr.el * shp) + (w2 * w2) * (fr.emq * shp) -
           (i * m * cw) * (fr.sh * s.f1 * s.f1t) - (i * w1) * (fr.elh * fr.ch * fr.psip * s.f1) -
           (i * w2) * (fr.emqh * fr.ch * fr.psibp * s.f1t);
    r[1] = dxm + dtm - Cplx(2.0) * (w2 * w2) * (fr.emq * fr.sh2) + (2.0 * m * m / (w1 * w1)) * fr.eq +
           (i * m / w1) * (fr.eqh * fr.psibp * s.f1) + (i * w2) * (fr.emqh * fr.sh * fr.psibp * s.f1t);
    r[2] = dxm - dtm + Cplx(2.0) * (w1 * w1) * (fr.el * fr.sh2) - (2.0 * m * m / (w2 * w2)) * fr.eml +
           (i * m / w2) * (fr.emlh * fr.psip * s.f1t) - (i * w1) * (fr.elh * fr.sh * fr.psip * s.f1);
    r[3] = fr.psim + w1 * (fr.elh * fr.sh * s.f1) + (m / w2) * (fr.emlh * s.f1t);
    r[4] = fr.psibm - w2 * (fr.emqh * fr.sh * s.f1t) + (m / w1) * (fr.eqh * s.f1);
    r[5] = dtf1 - (m / (2.0 * w1)) * (fr.eqh * fr.psibp) + (w1 / 2.0) * (fr.elh * fr.sh * fr.psip) -
           (m / 2.0 * cw) * (fr.ch * s.f1t);
    r[6] = dtf1t + (m / (2.0 * w2)) * (fr.emlh * fr.psip) + (w2 / 2.0) * (fr.emqh * fr.sh * fr.psibp) +
           (m / 2.0 * cw) * (fr.ch * s.f1);
  } else {
    const Cplx sg = prm.sigma;
    const Cplx ct = std::cosh(prm.tau);
    const Cplx rp = std::sqrt(Cplx(m) * sg);
    const Cplx rs = std::sqrt(Cplx(m) / sg);
    const Cplx cs = sg + 1.0 / sg;
    const Grassmann angular = fr.sh2 + (ct * ct) * fr.one;
    const Grassmann mix = sg * fr.emq + (1.0 / sg) * fr.el;  // sigma e^{-q} + sigma^-1 e^{lambda0}
    r[0] = dxp - dtp + Cplx(2.0) * dtl0 + m * (mix * shp) + (i * m * cs) * (fr.sh * s.f1 * s.f1t) -
           (i * rp) * (fr.emqh * fr.ch * fr.psibp * s.f1t) + (i * rs) * (fr.elh * fr.ch * fr.psip * s.f1) +
           (i * m * ct) * (mix * fr.sh * s.f1 * s.f1t);
    r[1] = dxm + dtm - (2.0 * m) * sg * (fr.emq * angular - fr.eq) -
           (i * rp) * ((fr.eqh - ct * fr.emqh) * fr.psibp * s.f1) + (i * rp) * (fr.emqh * fr.sh * fr.psibp * s.f1t) -
           (2.0 * i * m * sg * ct) * (fr.emq * fr.ch * s.f1 * s.f1t);
    r[2] = dxm - dtm - (2.0 * m / sg) * (fr.eml - fr.el * angular) +
           (i * rs) * ((fr.emlh - ct * fr.elh) * fr.psip * s.f1t + fr.elh * fr.sh * fr.psip * s.f1) +
           (2.0 * i * m / sg * ct) * (fr.el * fr.ch * s.f1 * s.f1t);
    r[3] = fr.psim - rs * (fr.elh * fr.sh * s.f1 - (fr.emlh + ct * fr.elh) * s.f1t);
    r[4] = fr.psibm - rp * ((fr.eqh + ct * fr.emqh) * s.f1 + fr.emqh * fr.sh * s.f1t);
    r[5] = dtf1 + (rp / 2.0) * ((fr.eqh + ct * fr.emqh) * fr.psibp) - (rs / 2.0) * (fr.elh * fr.sh * fr.psip) +
           (m / 2.0) * ((cs * fr.one + ct * mix) * fr.ch * s.f1t);
    r[6] = dtf1t + (rp / 2.0) * (fr.emqh * fr.sh * fr.psibp) + (rs / 2.0) * ((fr.emlh + ct * fr.elh) * fr.psip) -
           (m / 2.0) * ((cs * fr.one + ct * mix) * fr.ch * s.f1);
  }
  return r;
}

// Spatial derivatives of the defect fermions implied by the sewing
// conditions (four-parameter form); returned as {dx f1, dx f1t}.
inline std::pair<Grassmann, Grassmann> defect_xderivatives(const DefectState& s, const DefectParams& prm) {
  const defect_detail::Frame fr = defect_detail::make_frame(s);
  const double m = prm.m;
  const Cplx w1 = prm.w1, w2 = prm.w2;
  const Grassmann xf1 = (m / (2.0 * w1)) * (fr.eqh * fr.psibp) + (w1 / 2.0) * (fr.elh * fr.sh * fr.psip) +
                        (m / 2.0) * (w2 / w1 - w1 / w2) * (fr.ch * s.f1t);
  const Grassmann xf1t = -(w2 / 2.0) * (fr.emqh * fr.sh * fr.psibp) + (m / (2.0 * w2)) * (fr.emlh * fr.psip) +
                         (m / 2.0) * (w1 / w2 - w2 / w1) * (fr.ch * s.f1);
  return {xf1, xf1t};
}

struct DefectCharges {
  Grassmann E_D, P_D, Q_D, Qbar_D;
};

// Defect contributions to the conserved energy, momentum and supercharges
// (four-parameter form; the supercharge corrections are only known there).
inline DefectCharges modified_charges(const DefectState& s, const DefectParams& prm) {
  const defect_detail::Frame fr = defect_detail::make_frame(s);
  const Cplx i(0.0, 1.0);
  const double m = prm.m;
  const Cplx w1 = prm.w1, w2 = prm.w2;
  const DefectPotentials pot = defect_potentials(s, prm, DefectForm::omega);

  DefectCharges out;
  const Grassmann ferm_e = (i / 2.0) * (fr.psibp * fr.psibm - fr.psip * fr.psim);
  const Grassmann ferm_p = (i / 2.0) * (fr.psibp * fr.psibm + fr.psip * fr.psim);
  out.E_D = pot.B0p + pot.B0m + ferm_e + pot.B1p + pot.B1m;
  out.P_D = pot.B0p - pot.B0m + ferm_p + pot.B1p - pot.B1m;
  out.Q_D = Cplx(-2.0) * w1 * (fr.elh * fr.sh * s.f1) + (2.0 * m / w2) * (fr.emlh * s.f1t);
  out.Qbar_D = Cplx(2.0) * w2 * (fr.emqh * fr.sh * s.f1t) + (2.0 * m / w1) * (fr.eqh * s.f1);
  return out;
}

struct SusyVariation {
  std::array<Grassmann, 2> delta_phi, delta_psi, delta_psibar;
  Grassmann delta_lambda0, delta_f1, delta_f1t;
};

// Supersymmetry transformation preserved by the defect: the bulk variation
// on both sides plus the variation of the defect degrees of freedom
// (four-parameter form).  Bulk points must carry dx_phi/dt_phi.
inline SusyVariation susy_defect_transform(const DefectState& s, const Grassmann& eps,
                                           const Grassmann& epsbar, const DefectParams& prm) {
  const defect_detail::Frame fr = defect_detail::make_frame(s);
  const Cplx i(0.0, 1.0);
  const double m = prm.m;
  const Cplx w1 = prm.w1, w2 = prm.w2;

  SusyVariation out;
  const BulkPoint* sides[2] = {&s.side1, &s.side2};
  for (int p = 0; p < 2; ++p) {
    const BulkPoint& bp = *sides[p];
    const Grassmann dx = bp.need(bp.dx_phi, "dx_phi");
    const Grassmann dt = bp.need(bp.dt_phi, "dt_phi");
    out.delta_phi[p] = eps * bp.psi + epsbar * bp.psibar;
    out.delta_psi[p] = (i / 2.0) * (eps * (dx - dt)) + (i * m) * (epsbar * sinh_of(bp.phi));
    out.delta_psibar[p] = -(i / 2.0) * (epsbar * (dx + dt)) - (i * m) * (eps * sinh_of(bp.phi));
  }
  out.delta_lambda0 = eps * (fr.psip + w1 * (fr.elh * fr.ch * s.f1)) - epsbar * (w2 * (fr.emqh * fr.ch * s.f1t));
  out.delta_f1 = (i * w1) * (eps * fr.elh * fr.sh) - (i * m / w1) * (epsbar * fr.eqh);
  out.delta_f1t = -(i * m / w2) * (eps * fr.emlh) - (i * w2) * (epsbar * fr.emqh * fr.sh);
  return out;
}

// ---------------------------------------------------------------------------
// Poisson-bracket consistency constraints on the defect potentials.
// ---------------------------------------------------------------------------

// Sample point for the constraint check: bosonic boundary values are plain
// scalars; the four fermionic fields are the generators 0..3 of a rank-4
// Grassmann algebra (psi+, psibar+, f1, f1t in that order).
struct PBSample {
  Cplx phip, phim, lambda0;
};

inline Grassmann dual_value(const GrassmannD& x) {
  Grassmann out(x.generators());
  for (unsigned k = 0; k < x.size(); ++k) out[k] = x[k].v;
  return out;
}

inline Grassmann dual_deriv(const GrassmannD& x) {
  Grassmann out(x.generators());
  for (unsigned k = 0; k < x.size(); ++k) out[k] = x[k].d;
  return out;
}

namespace defect_detail {

constexpr int kPBGenerators = 4;
constexpr int kBitPsip = 0, kBitPsibp = 1, kBitF1 = 2, kBitF1t = 3;

inline DefectPotentialsT<Dual> pb_potentials(const PBSample& s, const DefectParams& prm, DefectForm form,
                                             Cplx seed_phip, Cplx seed_phim, Cplx seed_l0) {
  const int n = kPBGenerators;
  auto sc = [&](Cplx v, Cplx d) { return GrassmannD::scalar(n, Dual(v, d)); };
  return defect_potentials_fields(sc(s.phip, seed_phip), sc(s.phim, seed_phim), sc(s.lambda0, seed_l0),
                                  GrassmannD::generator(n, kBitPsip), GrassmannD::generator(n, kBitPsibp),
                                  GrassmannD::generator(n, kBitF1), GrassmannD::generator(n, kBitF1t), prm,
                                  form);
}

}  // namespace defect_detail

// Residuals of the two Poisson-bracket constraints the potentials must
// satisfy for the modified energy to be conserved:
//   pb1: 2({B0+,B0-} cross terms in (phi-, lambda0)) - (V1 - V2)
//   pb2: the mixed B0/B1 cross terms plus the fermionic-derivative bilinear
//        minus (W1 - W2), with psi-/psibar- eliminated through the sewing
//        conditions of the same form.
// Bosonic partials are taken with forward-mode dual numbers; fermionic
// partials are exact left derivatives.
inline std::pair<Grassmann, Grassmann> pb_constraint_residuals(const PBSample& s, const DefectParams& prm,
                                                               DefectForm form) {
  using namespace defect_detail;
  const int n = kPBGenerators;
  const Cplx i(0.0, 1.0);
  const double m = prm.m;

  const DefectPotentialsT<Dual> dm = pb_potentials(s, prm, form, 0.0, 1.0, 0.0);
  const DefectPotentialsT<Dual> dl = pb_potentials(s, prm, form, 0.0, 0.0, 1.0);

  const Grassmann B0p_m = dual_deriv(dm.B0p), B0m_m = dual_deriv(dm.B0m);
  const Grassmann B1p_m = dual_deriv(dm.B1p), B1m_m = dual_deriv(dm.B1m);
  const Grassmann B0p_l = dual_deriv(dl.B0p), B0m_l = dual_deriv(dl.B0m);
  const Grassmann B1p_l = dual_deriv(dl.B1p), B1m_l = dual_deriv(dl.B1m);
  const Grassmann B1p = dual_value(dm.B1p), B1m = dual_value(dm.B1m);

  const Grassmann B1p_f1 = left_derivative(B1p, kBitF1), B1m_f1 = left_derivative(B1m, kBitF1);
  const Grassmann B1p_f1t = left_derivative(B1p, kBitF1t), B1m_f1t = left_derivative(B1m, kBitF1t);

  // Bulk potential difference V1 - V2 across the defect.
  const Cplx phi1 = 0.5 * (s.phip + s.phim), phi2 = 0.5 * (s.phip - s.phim);
  const Grassmann v_diff =
      Grassmann::scalar(n, m * m * (std::cosh(2.0 * phi1) - std::cosh(2.0 * phi2)));

  const Grassmann pb1 = Cplx(2.0) * (B0p_m * B0m_l - B0p_l * B0m_m) - v_diff;

  // W1 - W2 with psi-, psibar- given by the sewing conditions.
  DefectState st = DefectState::zero(n);
  st.lambda0 = Grassmann::scalar(n, s.lambda0);
  st.f1 = Grassmann::generator(n, kBitF1);
  st.f1t = Grassmann::generator(n, kBitF1t);
  st.side1.phi = Grassmann::scalar(n, phi1);
  st.side2.phi = Grassmann::scalar(n, phi2);
  st.side1.dx_phi = st.side1.dt_phi = Grassmann(n);
  st.side2.dx_phi = st.side2.dt_phi = Grassmann(n);
  const std::array<Grassmann, 7> cond = defect_condition_residuals(st, prm, form);
  const Grassmann psip = Grassmann::generator(n, kBitPsip);
  const Grassmann psibp = Grassmann::generator(n, kBitPsibp);
  const Grassmann psim = Cplx(-1.0) * cond[3];   // residual at psim = 0 is -(RHS)
  const Grassmann psibm = Cplx(-1.0) * cond[4];
  const Grassmann psi1 = Cplx(0.5) * (psip + psim), psi2 = Cplx(0.5) * (psip - psim);
  const Grassmann psib1 = Cplx(0.5) * (psibp + psibm), psib2 = Cplx(0.5) * (psibp - psibm);
  const Grassmann w_diff =
      (-4.0 * i * m) * (std::cosh(phi1) * (psib1 * psi1) - std::cosh(phi2) * (psib2 * psi2));

  const Grassmann pb2 = Cplx(2.0) * (B0p_m * B1m_l - B0p_l * B1m_m) -
                        Cplx(2.0) * (B0m_m * B1p_l - B0m_l * B1p_m) -
                        i * (B1p_f1 * B1m_f1 + B1p_f1t * B1m_f1t) - w_diff;
  return {pb1, pb2};
}

// ---------------------------------------------------------------------------
// Equivalence shift of the bosonic defect potentials.
// ---------------------------------------------------------------------------

// A candidate shift rho(phi+, phi-, lambda0) of the bosonic potentials, given
// as a dual-number function so its partial derivatives are available.
using BoundaryFn = std::function<Dual(const Dual& phip, const Dual& phim, const Dual& lambda0)>;

// Residual of the constraint a shift (rho+, rho-) of (B0+, B0-) must satisfy
// to leave the sewing conditions intact:
//   d(B0+)/dphi- * d(rho-)/dlambda0 - d(rho+)/dlambda0 * d(B0-)/dphi- = 0.
// Returns the general residual and the specialized display
//   (1/2) sinh(phi-) [w2^2 e^{-(phi+-l0)} d(rho-)/dl0 - w1^2 e^{l0} d(rho+)/dl0],
// which agree identically for the four-parameter bosonic potentials.
inline std::pair<Cplx, Cplx> equivalence_shift_residual(const BoundaryFn& rho_p, const BoundaryFn& rho_m,
                                                        const DefectParams& prm, Cplx phip, Cplx phim,
                                                        Cplx lambda0) {
  const double m = prm.m;
  const Cplx w1 = prm.w1, w2 = prm.w2;
  const Cplx q = phip - lambda0;
  // Bosonic potentials differentiated by hand (closed forms).
  const Cplx B0p_m = w2 * w2 * std::exp(-q) * 0.5 * std::sinh(phim);
  const Cplx B0m_m = w1 * w1 * std::exp(lambda0) * 0.5 * std::sinh(phim);
  const Dual zp(phip, 0.0), zm(phim, 0.0);
  const Dual rl_p = rho_p(zp, zm, Dual(lambda0, 1.0));
  const Dual rl_m = rho_m(zp, zm, Dual(lambda0, 1.0));
  const Cplx general = B0p_m * rl_m.d - rl_p.d * B0m_m;
  const Cplx specialized =
      0.5 * std::sinh(phim) * (w2 * w2 * std::exp(-q) * rl_m.d - w1 * w1 * std::exp(lambda0) * rl_p.d);
  return {general, specialized};
}

// ---------------------------------------------------------------------------
// Structural identities of the potentials.
// ---------------------------------------------------------------------------

// Residuals of the structural identities the potentials satisfy in either
// form, evaluated at a PB sample point:
//   [0] dB0+/dphi+ + dB0+/dlambda0     [1] dB1+/dphi+ + dB1+/dlambda0
//   [2] dB0-/dphi+                     [3] dB1-/dphi+
//   [4] dB1+/dpsi+                     [5] dB1-/dpsibar+
inline std::array<Grassmann, 6> structural_identity_residuals(const PBSample& s, const DefectParams& prm,
                                                              DefectForm form) {
  using namespace defect_detail;
  const DefectPotentialsT<Dual> dp = pb_potentials(s, prm, form, 1.0, 0.0, 0.0);
  const DefectPotentialsT<Dual> dl = pb_potentials(s, prm, form, 0.0, 0.0, 1.0);
  std::array<Grassmann, 6> r;
  r[0] = dual_deriv(dp.B0p) + dual_deriv(dl.B0p);
  r[1] = dual_deriv(dp.B1p) + dual_deriv(dl.B1p);
  r[2] = dual_deriv(dp.B0m);
  r[3] = dual_deriv(dp.B1m);
  r[4] = left_derivative(dual_value(dp.B1p), kBitPsip);
  r[5] = left_derivative(dual_value(dp.B1m), kBitPsibp);
  return r;
}

// ---------------------------------------------------------------------------
// Bosonic and purely fermionic limits.
// ---------------------------------------------------------------------------

struct BosonicDefectData {
  Cplx phip, phim, lambda0;
  Cplx dx_phip, dt_phip, dx_phim, dt_phim, dt_lambda0;
};

// Defect Lagrangian of the bosonic truncation:
//   phi- dt(lambda0) - (1/2) phi- dt(phi+) + B0+ + B0-.
inline Cplx bosonic_defect_lagrangian(const BosonicDefectData& d, const DefectParams& prm) {
  const double m = prm.m;
  const Cplx w1 = prm.w1, w2 = prm.w2;
  const Cplx q = d.phip - d.lambda0;
  const Cplx sh2 = std::pow(std::sinh(0.5 * d.phim), 2);
  const Cplx B0p = w2 * w2 * std::exp(-q) * sh2 + m * m / (w1 * w1) * std::exp(q);
  const Cplx B0m = w1 * w1 * std::exp(d.lambda0) * sh2 + m * m / (w2 * w2) * std::exp(-d.lambda0);
  return d.phim * d.dt_lambda0 - 0.5 * d.phim * d.dt_phip + B0p + B0m;
}

// Sewing conditions of the bosonic truncation, as residuals.
inline std::array<Cplx, 3> bosonic_defect_condition_residuals(const BosonicDefectData& d,
                                                              const DefectParams& prm) {
  const double m = prm.m;
  const Cplx w1 = prm.w1, w2 = prm.w2;
  const Cplx q = d.phip - d.lambda0;
  const Cplx sh2 = std::pow(std::sinh(0.5 * d.phim), 2);
  std::array<Cplx, 3> r;
  r[0] = d.dx_phip - d.dt_phip + 2.0 * d.dt_lambda0 +
         (w1 * w1 * std::exp(d.lambda0) + w2 * w2 * std::exp(-q)) * std::sinh(d.phim);
  r[1] = d.dx_phim + d.dt_phim - 2.0 * w2 * w2 * std::exp(-q) * sh2 + 2.0 * m * m / (w1 * w1) * std::exp(q);
  r[2] = d.dx_phim - d.dt_phim + 2.0 * w1 * w1 * std::exp(d.lambda0) * sh2 -
         2.0 * m * m / (w2 * w2) * std::exp(-d.lambda0);
  return r;
}

// Purely fermionic limit (both bulk bosons and lambda0 frozen to zero):
// the defect potentials collapse to bilinears.
inline std::pair<Grassmann, Grassmann> fermionic_limit_potentials(const Grassmann& psip,
                                                                  const Grassmann& psibp,
                                                                  const Grassmann& f1, const Grassmann& f1t,
                                                                  const DefectParams& prm) {
  const Cplx i(0.0, 1.0);
  const double m = prm.m;
  const Grassmann B1p = (i * m / prm.w1) * ((psibp + prm.w2 * f1t) * f1);
  const Grassmann B1m = (-i * m / prm.w2) * ((psip + prm.w1 * f1) * f1t);
  return {B1p, B1m};
}

// Sewing conditions of the fermionic limit, as residuals
// {psi-, psibar-, dt f1, dt f1t}.
inline std::array<Grassmann, 4> fermionic_limit_condition_residuals(
    const Grassmann& psip, const Grassmann& psibp, const Grassmann& psim, const Grassmann& psibm,
    const Grassmann& f1, const Grassmann& f1t, const Grassmann& dt_f1, const Grassmann& dt_f1t,
    const DefectParams& prm) {
  const double m = prm.m;
  const Cplx w1 = prm.w1, w2 = prm.w2;
  const Cplx cw = w1 / w2 + w2 / w1;
  std::array<Grassmann, 4> r;
  r[0] = psim + (m / w2) * f1t;
  r[1] = psibm + (m / w1) * f1;
  r[2] = dt_f1 - (m / (2.0 * w1)) * psibp - (m / 2.0 * cw) * f1t;
  r[3] = dt_f1t + (m / (2.0 * w2)) * psip + (m / 2.0 * cw) * f1;
  return r;
}

// Residual of the fermionic-limit Poisson-bracket constraint with f1 and f1t
// treated as independent fields.  It does not vanish in general; it vanishes
// only after the identification f1t = +/- f1 (see substitute_f1t).
inline Grassmann fermionic_pb2_residual(const DefectParams& prm) {
  using namespace defect_detail;
  const int n = kPBGenerators;
  const Cplx i(0.0, 1.0);
  const double m = prm.m;
  const Grassmann psip = Grassmann::generator(n, kBitPsip);
  const Grassmann psibp = Grassmann::generator(n, kBitPsibp);
  const Grassmann f1 = Grassmann::generator(n, kBitF1);
  const Grassmann f1t = Grassmann::generator(n, kBitF1t);
  const auto [B1p, B1m] = fermionic_limit_potentials(psip, psibp, f1, f1t, prm);
  const Grassmann psim = (-m / prm.w2) * f1t;
  const Grassmann psibm = (-m / prm.w1) * f1;
  const Grassmann psi1 = Cplx(0.5) * (psip + psim), psi2 = Cplx(0.5) * (psip - psim);
  const Grassmann psib1 = Cplx(0.5) * (psibp + psibm), psib2 = Cplx(0.5) * (psibp - psibm);
  const Grassmann w_diff = (-4.0 * i * m) * (psib1 * psi1 - psib2 * psi2);
  return Cplx(-1.0) * i *
             (left_derivative(B1p, kBitF1) * left_derivative(B1m, kBitF1) +
              left_derivative(B1p, kBitF1t) * left_derivative(B1m, kBitF1t)) -
         w_diff;
}

// Impose f1t = sign * f1 on an element expressed in the PB generator basis:
// any monomial containing both f1 and f1t dies, and f1t is replaced by
// sign * f1 elsewhere.
inline Grassmann substitute_f1t(const Grassmann& x, int sign) {
  using namespace defect_detail;
  const unsigned bf = 1u << kBitF1, bft = 1u << kBitF1t;
  Grassmann out(x.generators());
  for (unsigned mask = 0; mask < x.size(); ++mask) {
    if (x[mask] == Cplx(0.0)) continue;
    if (!(mask & bft)) {
      out[mask] += x[mask];
      continue;
    }
    if (mask & bf) continue;  // f1 f1t -> sign * f1 f1 = 0
    // Move f1t (bit 3) down to the f1 slot (bit 2); they are adjacent, so
    // no generators sit between them and no reordering sign arises.
    out[(mask & ~bft) | bf] += Cplx(double(sign)) * x[mask];
  }
  return out;
}

// Constrained fermionic defect Lagrangian after the identification
// f1t = sign * f1 (sign = +1 or -1):
//   (i/2)(psibar+ psibar- - psi+ psi-) + 2 i f1 dt f1
//   + i m [psibar+/w1 - sign * psi+/w2] f1,
// with psi- = -sign (m/w2) f1 and psibar- = -(m/w1) f1.
inline Grassmann fermionic_constrained_lagrangian(const Grassmann& psip, const Grassmann& psibp,
                                                  const Grassmann& f1, const Grassmann& dt_f1,
                                                  const DefectParams& prm, int sign) {
  const Cplx i(0.0, 1.0);
  const double m = prm.m;
  const Grassmann psim = (-double(sign) * m / prm.w2) * f1;
  const Grassmann psibm = (-m / prm.w1) * f1;
  const Grassmann coupling = (1.0 / prm.w1) * psibp - (double(sign) / prm.w2) * psip;
  return (i / 2.0) * (psibp * psibm - psip * psim) + (2.0 * i) * (f1 * dt_f1) +
         (i * m) * (coupling * f1);
}

}  // namespace sshg
