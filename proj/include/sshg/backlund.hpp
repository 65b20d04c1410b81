#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sshg/model.hpp"
#include "sshg/superfield.hpp"

namespace sshg {

/// Auxiliary fields living at the interface between the two solutions:
/// one even field lambda0 and the two odd fields f1, f1t ("f-tilde").
/// Lightcone derivative slots are optional, like in BulkPoint.
struct AuxState {
  Grassmann lambda0, f1, f1t;
  std::optional<Grassmann> dp_lambda0, dm_lambda0;
  std::optional<Grassmann> dp_f1, dm_f1, dp_f1t, dm_f1t;

  static AuxState zero(int n) {
    AuxState a{Grassmann(n), Grassmann(n), Grassmann(n)};
    a.dp_lambda0 = a.dm_lambda0 = Grassmann(n);
    a.dp_f1 = a.dm_f1 = a.dp_f1t = a.dm_f1t = Grassmann(n);
    return a;
  }
  const Grassmann& need(const std::optional<Grassmann>& slot, const char* what) const {
    if (!slot) throw std::invalid_argument(std::string("aux state: missing ") + what);
    return *slot;
  }
};

/// Four-parameter form of the auto-Backlund transformation. The defect
/// theory uses the two-parameter slice omega3 = m/omega1, omega4 = m/omega2.
struct BacklundParams {
  Cplx w1{1.0}, w2{1.0}, w3{1.0}, w4{1.0};
  double m = 1.0;

  static BacklundParams defect_slice(Cplx w1, Cplx w2, double m) {
    return {w1, w2, m / w1, m / w2, m};
  }
};

/// Two-parameter (sigma, tau) form produced by fusing two defects. At
/// tau = i pi/2 it reduces to the four-parameter form on the slice below.
struct FusedParams {
  Cplx sigma{1.0}, tau{0.0};
  double m = 1.0;

  BacklundParams omega_equivalent() const {
    Cplx rs = std::sqrt(Cplx(m) / sigma), rp = std::sqrt(Cplx(m) * sigma);
    return {-rs, rp, -rp, rs, m};
  }
};

namespace backlund_detail {

/// Everything the right-hand sides need, computed once per call.
struct Frame {
  Grassmann phip, phim;                // phi+ = phi1+phi2, phi- = phi1-phi2
  Grassmann psip, psipbar;             // psi+ = psi1+psi2 etc.
  Grassmann psim, psimbar;             // psi- = psi1-psi2 etc.
  Grassmann el, elh, emlh;             // e^{lambda0}, e^{lambda0/2}, e^{-lambda0/2}
  Grassmann eq, eqh, emq, emqh;        // q = phi+ - lambda0: e^{q}, e^{q/2}, e^{-q}, e^{-q/2}
  Grassmann shm, chm, sh2m;            // sinh(phi-/2), cosh(phi-/2), sinh(phi-)
  Grassmann eml;                       // e^{-lambda0}
};

inline Frame make_frame(const BulkPoint& p1, const BulkPoint& p2, const AuxState& aux) {
  Frame f;
  f.phip = p1.phi + p2.phi;
  f.phim = p1.phi - p2.phi;
  f.psip = p1.psi + p2.psi;
  f.psipbar = p1.psibar + p2.psibar;
  f.psim = p1.psi - p2.psi;
  f.psimbar = p1.psibar - p2.psibar;
  f.el = exp_of(aux.lambda0);
  f.eml = exp_of(-1.0 * aux.lambda0);
  f.elh = exp_of(0.5 * aux.lambda0);
  f.emlh = exp_of(-0.5 * aux.lambda0);
  Grassmann q = f.phip - aux.lambda0;
  f.eq = exp_of(q);
  f.emq = exp_of(-1.0 * q);
  f.eqh = exp_of(0.5 * q);
  f.emqh = exp_of(-0.5 * q);
  f.shm = sinh_of(0.5 * f.phim);
  f.chm = cosh_of(0.5 * f.phim);
  f.sh2m = sinh_of(f.phim);
  return f;
}

}  // namespace backlund_detail

/// Residuals of the ten component relations, in the order:
///   0: d-(phi+ - lambda0)   1: d+ lambda0   2: d+ phi-   3: d- phi-
///   4: psi- (algebraic)     5: psibar- (algebraic)
///   6: d+ f1   7: d- f1   8: d+ f1t   9: d- f1t
/// Lightcone derivatives of phi1/phi2 are taken from the lab-frame slots;
/// aux derivatives come from the AuxState slots.
inline std::array<Grassmann, 10> component_backlund_residuals(const BulkPoint& p1, const BulkPoint& p2,
                                                              const AuxState& aux, const BacklundParams& bp) {
  using backlund_detail::make_frame;
  const Cplx i(0.0, 1.0);
  const Cplx w1 = bp.w1, w2 = bp.w2, w3 = bp.w3, w4 = bp.w4;
  const double m = bp.m;
  backlund_detail::Frame fr = make_frame(p1, p2, aux);
  const Grassmann& f1 = aux.f1;
  const Grassmann& ft = aux.f1t;

  Grassmann dp_phim = dplus(p1.dx_phi, p1.dt_phi) - dplus(p2.dx_phi, p2.dt_phi);
  Grassmann dm_phim = dminus(p1.dx_phi, p1.dt_phi) - dminus(p2.dx_phi, p2.dt_phi);
  Grassmann dp_phip = dplus(p1.dx_phi, p1.dt_phi) + dplus(p2.dx_phi, p2.dt_phi);
  Grassmann dm_phip = dminus(p1.dx_phi, p1.dt_phi) + dminus(p2.dx_phi, p2.dt_phi);

  std::array<Grassmann, 10> r;
  // d-(phi+ - lambda0) = -(m w1 / 2 w3) e^{l} sinh(phi-)
  //   + (i w1 / 2) e^{l/2} cosh(phi-/2) psi+ f1 - (i w1 w4 / 2) sinh(phi-/2) f1t f1
  r[0] = dm_phip - aux.need(aux.dm_lambda0, "dm lambda0") + (m * w1 / (2.0 * w3)) * (fr.el * fr.sh2m) -
         (i * w1 / 2.0) * (fr.elh * fr.chm * fr.psip * f1) + (i * w1 * w4 / 2.0) * (fr.shm * ft * f1);
  // d+ lambda0 = -(m w2 / 2 w4) e^{-q} sinh(phi-)
  //   + (i w2 / 2) e^{-q/2} cosh(phi-/2) psibar+ f1t + (i w2 w3 / 2) sinh(phi-/2) f1 f1t
  r[1] = aux.need(aux.dp_lambda0, "dp lambda0") + (m * w2 / (2.0 * w4)) * (fr.emq * fr.sh2m) -
         (i * w2 / 2.0) * (fr.emqh * fr.chm * fr.psipbar * ft) - (i * w2 * w3 / 2.0) * (fr.shm * f1 * ft);
  // d+ phi- = (m w2 / w4) e^{-q} sinh^2(phi-/2) - (m w3 / w1) e^{q}
  //   - (i w3 / 2) e^{q/2} psibar+ f1 - (i w2 / 2) e^{-q/2} sinh(phi-/2) psibar+ f1t
  r[2] = dp_phim - (m * w2 / w4) * (fr.emq * fr.shm * fr.shm) + (m * w3 / w1) * fr.eq +
         (i * w3 / 2.0) * (fr.eqh * fr.psipbar * f1) + (i * w2 / 2.0) * (fr.emqh * fr.shm * fr.psipbar * ft);
  // d- phi- = -(m w1 / w3) e^{l} sinh^2(phi-/2) + (m w4 / w2) e^{-l}
  //   - (i w4 / 2) e^{-l/2} psi+ f1t + (i w1 / 2) e^{l/2} sinh(phi-/2) psi+ f1
  r[3] = dm_phim + (m * w1 / w3) * (fr.el * fr.shm * fr.shm) - (m * w4 / w2) * fr.eml +
         (i * w4 / 2.0) * (fr.emlh * fr.psip * ft) - (i * w1 / 2.0) * (fr.elh * fr.shm * fr.psip * f1);
  // psi- = -w1 e^{l/2} sinh(phi-/2) f1 - w4 e^{-l/2} f1t
  r[4] = fr.psim + w1 * (fr.elh * fr.shm * f1) + w4 * (fr.emlh * ft);
  // psibar- = w2 e^{-q/2} sinh(phi-/2) f1t - w3 e^{q/2} f1
  r[5] = fr.psimbar - w2 * (fr.emqh * fr.shm * ft) + w3 * (fr.eqh * f1);
  // d+ f1 = (m / 2 w1) [ e^{q/2} psibar+ + w2 cosh(phi-/2) f1t ]
  r[6] = aux.need(aux.dp_f1, "dp f1") - (m / (2.0 * w1)) * (fr.eqh * fr.psipbar + w2 * (fr.chm * ft));
  // d- f1 = (m / 2 w3) [ e^{l/2} sinh(phi-/2) psi+ - w4 cosh(phi-/2) f1t ]
  r[7] = aux.need(aux.dm_f1, "dm f1") - (m / (2.0 * w3)) * (fr.elh * fr.shm * fr.psip - w4 * (fr.chm * ft));
  // d+ f1t = -(m / 2 w4) [ e^{-q/2} sinh(phi-/2) psibar+ + w3 cosh(phi-/2) f1 ]
  r[8] = aux.need(aux.dp_f1t, "dp f1t") + (m / (2.0 * w4)) * (fr.emqh * fr.shm * fr.psipbar + w3 * (fr.chm * f1));
  // d- f1t = (m / 2 w2) [ e^{-l/2} psi+ + w1 cosh(phi-/2) f1 ]
  r[9] = aux.need(aux.dm_f1t, "dm f1t") - (m / (2.0 * w2)) * (fr.emlh * fr.psip + w1 * (fr.chm * f1));
  return r;
}

/// Residuals of the fused two-parameter form, same ordering as the
/// component form so the tau = i pi/2 equivalence is slot-by-slot.
inline std::array<Grassmann, 10> fused_backlund_residuals(const BulkPoint& p1, const BulkPoint& p2,
                                                          const AuxState& aux, const FusedParams& fp) {
  using backlund_detail::make_frame;
  const Cplx i(0.0, 1.0);
  const double m = fp.m;
  const Cplx sg = fp.sigma;
  const Cplx ct = std::cosh(fp.tau);
  const Cplx rms = std::sqrt(Cplx(m) / sg);   // sqrt(m/sigma)
  const Cplx rmp = std::sqrt(Cplx(m) * sg);   // sqrt(m sigma)
  backlund_detail::Frame fr = make_frame(p1, p2, aux);
  const Grassmann& f1 = aux.f1;
  const Grassmann& ft = aux.f1t;
  const int n = aux.lambda0.generators();
  const Grassmann one = Grassmann::scalar(n, 1.0);

  Grassmann dp_phim = dplus(p1.dx_phi, p1.dt_phi) - dplus(p2.dx_phi, p2.dt_phi);
  Grassmann dm_phim = dminus(p1.dx_phi, p1.dt_phi) - dminus(p2.dx_phi, p2.dt_phi);
  Grassmann dm_phip = dminus(p1.dx_phi, p1.dt_phi) + dminus(p2.dx_phi, p2.dt_phi);

  std::array<Grassmann, 10> r;
  // d-(phi+ - lambda0) = -(m/2s) e^{l} sinh(phi-)
  //   - (i m / 2 s)(1 + e^{l} cosh tau) sinh(phi-/2) f1 f1t
  //   - (i/2) sqrt(m/s) e^{l/2} cosh(phi-/2) psi+ f1
  r[0] = dm_phip - aux.need(aux.dm_lambda0, "dm lambda0") + (m / (2.0 * sg)) * (fr.el * fr.sh2m) +
         (i * m / (2.0 * sg)) * ((one + ct * fr.el) * fr.shm * f1 * ft) +
         (i / 2.0) * rms * (fr.elh * fr.chm * fr.psip * f1);
  // d+ lambda0 = -(m s / 2) e^{-q} sinh(phi-)
  //   - (i m s / 2)(1 + e^{-q} cosh tau) sinh(phi-/2) f1 f1t
  //   + (i/2) sqrt(m s) e^{-q/2} cosh(phi-/2) psibar+ f1t
  r[1] = aux.need(aux.dp_lambda0, "dp lambda0") + (m * sg / 2.0) * (fr.emq * fr.sh2m) +
         (i * m * sg / 2.0) * ((one + ct * fr.emq) * fr.shm * f1 * ft) -
         (i / 2.0) * rmp * (fr.emqh * fr.chm * fr.psipbar * ft);
  // d+ phi- = m s [ e^{-q} (sinh^2(phi-/2) + cosh^2 tau) - e^{q} ]
  //   + (i/2) sqrt(m s) (e^{q/2} - e^{-q/2} cosh tau) psibar+ f1
  //   - (i/2) sqrt(m s) e^{-q/2} sinh(phi-/2) psibar+ f1t
  //   + i m s e^{-q} cosh tau cosh(phi-/2) f1 f1t
  r[2] = dp_phim - (m * sg) * (fr.emq * (fr.shm * fr.shm + (ct * ct) * one) - fr.eq) -
         (i / 2.0) * rmp * ((fr.eqh - ct * fr.emqh) * fr.psipbar * f1) +
         (i / 2.0) * rmp * (fr.emqh * fr.shm * fr.psipbar * ft) - (i * m * sg * ct) * (fr.emq * fr.chm * f1 * ft);
  // d- phi- = (m/s) [ e^{-l} - e^{l} (sinh^2(phi-/2) + cosh^2 tau) ]
  //   - (i/2) sqrt(m/s) [ (e^{-l/2} - e^{l/2} cosh tau) psi+ f1t
  //                       + e^{l/2} sinh(phi-/2) psi+ f1 ]
  //   - i (m/s) e^{l} cosh tau cosh(phi-/2) f1 f1t
  r[3] = dm_phim - (m / sg) * (fr.eml - fr.el * (fr.shm * fr.shm + (ct * ct) * one)) +
         (i / 2.0) * rms * ((fr.emlh - ct * fr.elh) * fr.psip * ft + fr.elh * fr.shm * fr.psip * f1) +
         (i * m / sg * ct) * (fr.el * fr.chm * f1 * ft);
  // psi- = sqrt(m/s) [ e^{l/2} sinh(phi-/2) f1 - (e^{-l/2} + e^{l/2} cosh tau) f1t ]
  r[4] = fr.psim - rms * (fr.elh * fr.shm * f1 - (fr.emlh + ct * fr.elh) * ft);
  // psibar- = sqrt(m s) [ (e^{q/2} + e^{-q/2} cosh tau) f1 + e^{-q/2} sinh(phi-/2) f1t ]
  r[5] = fr.psimbar - rmp * ((fr.eqh + ct * fr.emqh) * f1 + fr.emqh * fr.shm * ft);
  // d+ f1 = -(1/2) sqrt(m s) (e^{q/2} + e^{-q/2} cosh tau) psibar+
  //   - (m s / 2) cosh(phi-/2) f1t - (m s / 2) e^{-q} cosh tau cosh(phi-/2) f1t
  r[6] = aux.need(aux.dp_f1, "dp f1") + (rmp / 2.0) * ((fr.eqh + ct * fr.emqh) * fr.psipbar) +
         (m * sg / 2.0) * (fr.chm * ft) + (m * sg / 2.0) * ct * (fr.emq * fr.chm * ft);
  // d- f1 = -(1/2) sqrt(m/s) e^{l/2} sinh(phi-/2) psi+
  //   + (m / 2 s) (1 + e^{l} cosh tau) cosh(phi-/2) f1t
  r[7] = aux.need(aux.dm_f1, "dm f1") + (rms / 2.0) * (fr.elh * fr.shm * fr.psip) -
         (m / (2.0 * sg)) * ((one + ct * fr.el) * fr.chm * ft);
  // d+ f1t = -(1/2) sqrt(m s) e^{-q/2} sinh(phi-/2) psibar+
  //   + (m s / 2) cosh(phi-/2) f1 + (m s / 2) e^{-q} cosh tau cosh(phi-/2) f1
  r[8] = aux.need(aux.dp_f1t, "dp f1t") + (rmp / 2.0) * (fr.emqh * fr.shm * fr.psipbar) -
         (m * sg / 2.0) * (fr.chm * f1) - (m * sg / 2.0) * ct * (fr.emq * fr.chm * f1);
  // d- f1t = (1/2) sqrt(m/s) (e^{-l/2} + e^{l/2} cosh tau) psi+
  //   - (m / 2 s) (1 + e^{l} cosh tau) cosh(phi-/2) f1
  r[9] = aux.need(aux.dm_f1t, "dm f1t") - (rms / 2.0) * ((fr.emlh + ct * fr.elh) * fr.psip) +
         (m / (2.0 * sg)) * ((one + ct * fr.el) * fr.chm * f1);
  return r;
}

/// Residuals of the eight superfield relations for the fused form, in the
/// order: D-(Phi+ - Lambda), D+ Lambda, D+ Phi-, D- Phi-, D+ f, D- f,
/// D+ f~, D- f~. Each entry is a full superspace element.
inline std::array<Grassmann, 8> superfield_backlund_residuals(const Superfield& Phi1, const Superfield& Phi2,
                                                              const Superfield& Lam, const Superfield& f,
                                                              const Superfield& ft, const FusedParams& fp) {
  const Cplx i(0.0, 1.0);
  const double m = fp.m;
  const Cplx sg = fp.sigma;
  const Cplx ct = std::cosh(fp.tau);
  const Cplx rms = std::sqrt(Cplx(m) / sg);
  const Cplx rmp = std::sqrt(Cplx(m) * sg);
  Superfield Phip = Phi1 + Phi2;
  Superfield Phim = Phi1 - Phi2;
  Superfield Q = Phip - Lam;

  const Grassmann& L0 = Lam.value();
  const Grassmann& Q0 = Q.value();
  const Grassmann& P0 = Phim.value();
  const Grassmann& f0 = f.value();
  const Grassmann& ft0 = ft.value();
  const int n = L0.generators();
  const Grassmann one = Grassmann::scalar(n, 1.0);

  Grassmann elh = exp_of(0.5 * L0), emlh = exp_of(-0.5 * L0);
  Grassmann eqh = exp_of(0.5 * Q0), emqh = exp_of(-0.5 * Q0);
  Grassmann sh = sinh_of(0.5 * P0), ch = cosh_of(0.5 * P0);

  std::array<Grassmann, 8> r;
  r[0] = superD(-1, Q).value() + rms * (elh * f0 * ch);
  r[1] = superD(+1, Lam).value() - rmp * (emqh * ft0 * ch);
  r[2] = superD(+1, Phim).value() + rmp * ((eqh + ct * emqh) * f0 + emqh * sh * ft0);
  r[3] = superD(-1, Phim).value() - rms * ((emlh + ct * elh) * ft0 - elh * sh * f0);
  r[4] = superD(+1, f).value() + (i * rmp) * (eqh - ct * emqh);
  r[5] = superD(-1, f).value() - (i * rms) * (elh * sh);
  r[6] = superD(+1, ft).value() - (i * rmp) * (emqh * sh);
  r[7] = superD(-1, ft).value() - (i * rms) * (emlh - ct * elh);
  return r;
}

/// Result of sweeping the component relations over a spacetime grid:
/// the partner solution and auxiliary fields, stored row-major with x
/// fastest. Derivative slots of the bulk points are filled from the
/// relations themselves (they are algebraic in the state).
struct PartnerGrid {
  std::vector<double> xs, ts;
  std::vector<BulkPoint> side2;
  std::vector<AuxState> aux;
  const BulkPoint& at(int ix, int it) const { return side2[size_t(it) * xs.size() + ix]; }
  const AuxState& aux_at(int ix, int it) const { return aux[size_t(it) * xs.size() + ix]; }
};

namespace backlund_detail {

/// The dynamical interface state: phi2 plus the three auxiliary fields.
struct FlowState {
  Grassmann phi2, lambda0, f1, f1t;
};

/// Lightcone derivatives of the state implied by the relations, given the
/// side-1 point (with first derivatives). Returns pairs (d+, d-).
struct FlowDerivs {
  Grassmann dp_phi2, dm_phi2, dp_l0, dm_l0, dp_f1, dm_f1, dp_f1t, dm_f1t;
};

inline FlowDerivs flow_derivs(const BulkPoint& p1, const FlowState& s, const BacklundParams& bp) {
  const int n = s.phi2.generators();
  BulkPoint p2;
  p2.phi = s.phi2;
  // psi2 / psibar2 follow algebraically from the psi-/psibar- relations.
  AuxState ax = AuxState::zero(n);
  ax.lambda0 = s.lambda0;
  ax.f1 = s.f1;
  ax.f1t = s.f1t;
  Grassmann elh = exp_of(0.5 * s.lambda0), emlh = exp_of(-0.5 * s.lambda0);
  Grassmann q = p1.phi + s.phi2 - s.lambda0;
  Grassmann eqh = exp_of(0.5 * q), emqh = exp_of(-0.5 * q);
  Grassmann sh = sinh_of(0.5 * (p1.phi - s.phi2));
  Grassmann psim = -bp.w1 * (elh * sh * s.f1) - bp.w4 * (emlh * s.f1t);
  Grassmann psimbar = bp.w2 * (emqh * sh * s.f1t) - bp.w3 * (eqh * s.f1);
  p2.psi = p1.psi - psim;
  p2.psibar = p1.psibar - psimbar;
  p2.dx_phi = p2.dt_phi = Grassmann(n);  // placeholders; residuals below supply the derivatives

  std::array<Grassmann, 10> res = component_backlund_residuals(p1, p2, ax, bp);
  // With the p2 and aux derivative slots zeroed, each residual equals the
  // slot combination minus the right-hand side, so the implied derivatives
  // fall out by moving the known side-1 pieces across.
  FlowDerivs d;
  // res[2] = dp_phi1 - RHS(d+ phi-), and d+ phi2 = d+ phi1 - RHS.
  d.dp_phi2 = res[2];
  d.dm_phi2 = res[3];
  // res[0] = dm_phi1 - RHS(d-(phi+ - lambda0)); the relation gives
  // d- lambda0 = d- phi+ - RHS = (dm_phi1 + dm_phi2) - (dm_phi1 - res[0]).
  d.dm_l0 = d.dm_phi2 + res[0];
  d.dp_l0 = -1.0 * res[1];
  d.dp_f1 = -1.0 * res[6];
  d.dm_f1 = -1.0 * res[7];
  d.dp_f1t = -1.0 * res[8];
  d.dm_f1t = -1.0 * res[9];
  return d;
}

inline FlowState axpy(const FlowState& s, double h, const FlowDerivs& d, bool xdir) {
  // x-direction: d_x = d_+ + d_- ; t-direction: d_t = d_+ - d_-.
  double sgn = xdir ? 1.0 : -1.0;
  return {s.phi2 + h * (d.dp_phi2 + sgn * d.dm_phi2), s.lambda0 + h * (d.dp_l0 + sgn * d.dm_l0),
          s.f1 + h * (d.dp_f1 + sgn * d.dm_f1), s.f1t + h * (d.dp_f1t + sgn * d.dm_f1t)};
}

}  // namespace backlund_detail

/// Integrate the component relations to produce the partner solution on a
/// grid, starting from the state at (xs.front(), ts.front()). Marches
/// along the initial time slice in x, then up in t at each x, with
/// midpoint (second-order) steps. `side1` supplies the known solution
/// with first derivatives at arbitrary (x, t).
inline PartnerGrid generate_partner(const std::function<BulkPoint(double, double)>& side1,
                                    const std::vector<double>& xs, const std::vector<double>& ts,
                                    const Grassmann& phi2_0, const AuxState& aux0, const BacklundParams& bp) {
  using namespace backlund_detail;
  PartnerGrid g;
  g.xs = xs;
  g.ts = ts;
  const size_t nx = xs.size(), nt = ts.size();
  g.side2.resize(nx * nt);
  g.aux.resize(nx * nt);

  auto step = [&](const FlowState& s, double x, double t, double h, bool xdir) {
    BulkPoint pa = side1(x, t);
    FlowDerivs da = flow_derivs(pa, s, bp);
    FlowState mid = axpy(s, 0.5 * h, da, xdir);
    double xm = xdir ? x + 0.5 * h : x;
    double tm = xdir ? t : t + 0.5 * h;
    BulkPoint pm = side1(xm, tm);
    FlowDerivs dm = flow_derivs(pm, mid, bp);
    return axpy(s, h, dm, xdir);
  };

  auto record = [&](size_t ix, size_t it, const FlowState& s) {
    BulkPoint p1 = side1(xs[ix], ts[it]);
    FlowDerivs d = flow_derivs(p1, s, bp);
    const int n = s.phi2.generators();
    BulkPoint p2;
    p2.phi = s.phi2;
    Grassmann elh = exp_of(0.5 * s.lambda0), emlh = exp_of(-0.5 * s.lambda0);
    Grassmann q = p1.phi + s.phi2 - s.lambda0;
    Grassmann eqh = exp_of(0.5 * q), emqh = exp_of(-0.5 * q);
    Grassmann sh = sinh_of(0.5 * (p1.phi - s.phi2));
    p2.psi = p1.psi + bp.w1 * (elh * sh * s.f1) + bp.w4 * (emlh * s.f1t);
    p2.psibar = p1.psibar - bp.w2 * (emqh * sh * s.f1t) + bp.w3 * (eqh * s.f1);
    p2.dx_phi = d.dp_phi2 + d.dm_phi2;
    p2.dt_phi = d.dp_phi2 - d.dm_phi2;
    AuxState ax = AuxState::zero(n);
    ax.lambda0 = s.lambda0;
    ax.f1 = s.f1;
    ax.f1t = s.f1t;
    ax.dp_lambda0 = d.dp_l0;
    ax.dm_lambda0 = d.dm_l0;
    ax.dp_f1 = d.dp_f1;
    ax.dm_f1 = d.dm_f1;
    ax.dp_f1t = d.dp_f1t;
    ax.dm_f1t = d.dm_f1t;
    g.side2[it * nx + ix] = p2;
    g.aux[it * nx + ix] = ax;
  };

  FlowState s0{phi2_0, aux0.lambda0, aux0.f1, aux0.f1t};
  std::vector<FlowState> row(nx);
  row[0] = s0;
  for (size_t ix = 0; ix + 1 < nx; ++ix)
    row[ix + 1] = step(row[ix], xs[ix], ts[0], xs[ix + 1] - xs[ix], true);
  for (size_t ix = 0; ix < nx; ++ix) {
    FlowState s = row[ix];
    record(ix, 0, s);
    for (size_t it = 0; it + 1 < nt; ++it) {
      s = step(s, xs[ix], ts[it], ts[it + 1] - ts[it], false);
      record(ix, it + 1, s);
    }
  }
  return g;
}

}  // namespace sshg
