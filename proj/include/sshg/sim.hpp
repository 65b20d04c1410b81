#pragma once

// 1+1D lattice evolution of the bulk fields on two half-lines coupled by the
// type-II defect at x = 0.
//
// Scheme: interior boson by leapfrog (kick-drift-kick) on the wave equation;
// interior fermions by method-of-lines RK4 with second-order upwind
// derivatives along their characteristic directions; the junction closed by
// the characteristic decomposition of the sewing conditions.  With
// u = (dt + dx) phi (left-moving content) and v = (dt - dx) phi
// (right-moving content), the outgoing data at x = 0 are v on side 1 and u
// on side 2; the sewing conditions then determine the incoming pair, the
// lambda0 clock, and the f1 / f1t flows.  Only incoming characteristics are
// ever overwritten.
//
// Interior updates are data-parallel over sites (OpenMP when enabled, with a
// bitwise-identical serial reference path); the junction update is a small
// serialized section per step.

#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "sshg/defect.hpp"
#include "sshg/soliton.hpp"

namespace sshg {

struct SimParams {
  double L = 20.0;    // half-lines are [-L, 0] and [0, L]
  double dx = 0.02;
  double cfl = 0.5;   // dt = cfl * dx
  double m = 1.0;
  Cplx w1{1.0}, w2{1.0};
  int gen_count = 1;
  bool parallel = true;  // OpenMP interior kernels; false = serial reference

  double dt() const { return cfl * dx; }
  DefectParams defect() const { return DefectParams::from_omega(w1, w2, m); }
  void validate() const {
    if (cfl <= 0.0 || cfl > 1.0) throw std::invalid_argument("sim: need 0 < cfl <= 1");
    if (dx <= 0.0 || L <= 0.0) throw std::invalid_argument("sim: need positive dx, L");
    if (gen_count < 0 || gen_count > 8) throw std::invalid_argument("sim: gen_count out of range");
  }
};

// One half-line of fields, indexed left to right.
struct LatticeLine {
  std::vector<Grassmann> phi, phidot, psi, psibar;
  size_t size() const { return phi.size(); }
};

struct LatticeState {
  double dx = 0.0, dt = 0.0, t = 0.0;
  int n = 1;
  LatticeLine s1, s2;  // s1 covers [-L, 0] (last node = junction), s2 covers [0, L]
  Grassmann lambda0, f1, f1t;
  // Outgoing boson characteristics held at the junction: v = (dt - dx) phi on
  // side 1, u = (dt + dx) phi on side 2.  These evolve by their own advection
  // equations with one-sided stencils; the junction phidot values are derived.
  Grassmann v1j, u2j;

  size_t j1() const { return s1.size() - 1; }  // junction index on side 1
};

namespace sim_detail {

inline Grassmann accel(const Grassmann& phi_xx, const Grassmann& phi, const Grassmann& psi,
                       const Grassmann& psibar, double m) {
  const Cplx i(0.0, 1.0);
  return phi_xx - (2.0 * m * m) * sinh_of(2.0 * phi) + (4.0 * i * m) * (psibar * psi * sinh_of(phi));
}

inline Grassmann veff_prime(const Grassmann& phi, const Grassmann& psi, const Grassmann& psibar,
                            double m) {
  const Cplx i(0.0, 1.0);
  return (2.0 * m * m) * sinh_of(2.0 * phi) - (4.0 * i * m) * (psibar * psi * sinh_of(phi));
}

// Everything the sewing conditions dictate at the junction, given the
// junction fields and the outgoing fermion values.  RHS terms are read off
// the sewing residuals evaluated with all derivative slots zeroed.
struct Sewing {
  Grassmann psim, psibm;           // psi1 - psi2, psibar1 - psibar2
  Grassmann g0, g1, g2;            // field terms of the three boson conditions
  Grassmann rate_f1, rate_f1t;     // dt f1, dt f1t
};

inline Sewing sew(const Grassmann& phi1j, const Grassmann& phi2j, const Grassmann& lambda0,
                  const Grassmann& f1, const Grassmann& f1t, const Grassmann& psi1_out,
                  const Grassmann& psibar2_out, const DefectParams& prm) {
  const int n = phi1j.generators();
  const Grassmann zero(n);
  DefectState st = DefectState::zero(n);
  st.side1.phi = phi1j;
  st.side2.phi = phi2j;
  st.side1.dx_phi = st.side1.dt_phi = zero;
  st.side2.dx_phi = st.side2.dt_phi = zero;
  st.lambda0 = lambda0;
  st.f1 = f1;
  st.f1t = f1t;

  Sewing s;
  {
    // The psi-/psibar- right-hand sides involve only the defect fields.
    const auto r = defect_condition_residuals(st, prm, DefectForm::omega);
    s.psim = Cplx(-1.0) * r[3];
    s.psibm = Cplx(-1.0) * r[4];
  }
  // Incoming fermions follow from the outgoing ones, closing psi+/psibar+.
  const Grassmann psip = 2.0 * psi1_out - s.psim;
  const Grassmann psibp = 2.0 * psibar2_out + s.psibm;
  st.side1.psi = st.side2.psi = 0.5 * psip;
  st.side1.psibar = st.side2.psibar = 0.5 * psibp;
  const auto r = defect_condition_residuals(st, prm, DefectForm::omega);
  s.g0 = r[0];
  s.g1 = r[1];
  s.g2 = r[2];
  s.rate_f1 = Cplx(-1.0) * r[5];
  s.rate_f1t = Cplx(-1.0) * r[6];
  return s;
}

}  // namespace sim_detail

// Time derivatives of the junction variables, plus the algebraic values the
// junction imposes on the incoming characteristics.
struct JunctionRates {
  Grassmann dphi1, dphi2, dlambda0, df1, df1t, dv1j, du2j;
  Grassmann u1j, v2j;        // incoming boson characteristics
  Grassmann psim, psibm;     // fermion sewing values
};

inline JunctionRates junction_rates(const LatticeState& st, const SimParams& pm) {
  using sim_detail::Sewing;
  const size_t J = st.j1();
  const double h = st.dx;
  const DefectParams prm = pm.defect();

  const Grassmann& phi1j = st.s1.phi[J];
  const Grassmann& phi2j = st.s2.phi[0];
  const Sewing s = sim_detail::sew(phi1j, phi2j, st.lambda0, st.f1, st.f1t, st.s1.psi[J],
                                   st.s2.psibar[0], prm);

  // Outgoing characteristics advected up to the junction.  The junction
  // exchange is the leading error channel, so the extraction uses
  // higher-order stencils: 4th-order central dx(phi) where the stencil fits,
  // a 3rd-order biased one next to the junction, and a 4-point 3rd-order
  // one-sided advection derivative at the junction itself.
  auto v_at = [&](size_t j) {
    const auto& f = st.s1.phi;
    const Grassmann dxp =
        (j + 1 == J)  // node J-1: biased 4th-order stencil ending at the junction
            ? (1.0 / (12.0 * h)) *
                  (3.0 * f[j + 1] + 10.0 * f[j] - 18.0 * f[j - 1] + 6.0 * f[j - 2] - f[j - 3])
            : (1.0 / (12.0 * h)) *
                  (Cplx(-1.0) * f[j + 2] + 8.0 * f[j + 1] - 8.0 * f[j - 1] + f[j - 2]);
    return st.s1.phidot[j] - dxp;
  };
  auto u_at = [&](size_t j) {
    const auto& f = st.s2.phi;
    const Grassmann dxp =
        (j == 1) ? (-1.0 / (12.0 * h)) *
                       (3.0 * f[j - 1] + 10.0 * f[j] - 18.0 * f[j + 1] + 6.0 * f[j + 2] - f[j + 3])
                 : (1.0 / (12.0 * h)) *
                       (Cplx(-1.0) * f[j + 2] + 8.0 * f[j + 1] - 8.0 * f[j - 1] + f[j - 2]);
    return st.s2.phidot[j] + dxp;
  };
  JunctionRates r;
  r.dv1j = (-1.0 / (12.0 * h)) * (25.0 * st.v1j - 48.0 * v_at(J - 1) + 36.0 * v_at(J - 2) -
                                  16.0 * v_at(J - 3) + 3.0 * v_at(J - 4)) -
           sim_detail::veff_prime(phi1j, st.s1.psi[J], st.s1.psibar[J], pm.m);
  r.du2j = (1.0 / (12.0 * h)) * (-25.0 * st.u2j + 48.0 * u_at(1) - 36.0 * u_at(2) +
                                 16.0 * u_at(3) - 3.0 * u_at(4)) -
           sim_detail::veff_prime(phi2j, st.s2.psi[0], st.s2.psibar[0], pm.m);

  // Sewing closure: r1 = (u1 - u2) + g1 = 0, r2 = (v2 - v1) + g2 = 0,
  // r0 = -(v1 + v2) + 2 dt(lambda0) + g0 = 0.
  r.u1j = st.u2j - s.g1;
  r.v2j = st.v1j - s.g2;
  r.dphi1 = 0.5 * (r.u1j + st.v1j);
  r.dphi2 = 0.5 * (st.u2j + r.v2j);
  r.dlambda0 = 0.5 * (st.v1j + r.v2j - s.g0);
  r.df1 = s.rate_f1;
  r.df1t = s.rate_f1t;
  r.psim = s.psim;
  r.psibm = s.psibm;
  return r;
}

// Overwrite the incoming junction data (fermions and derived phidot values)
// so the stored arrays are consistent with the sewing conditions.
inline void sync_junction(LatticeState& st, const SimParams& pm) {
  const JunctionRates r = junction_rates(st, pm);
  const size_t J = st.j1();
  st.s1.psibar[J] = st.s2.psibar[0] + r.psibm;
  st.s2.psi[0] = st.s1.psi[J] - r.psim;
  st.s1.phidot[J] = r.dphi1;
  st.s2.phidot[0] = r.dphi2;
}

namespace sim_detail {

// dpsi/dt = -Dx psi - 2 m psibar cosh(phi)   (right-moving)
// dpsibar/dt = +Dx psibar + 2 m psi cosh(phi) (left-moving)
// Central differences inside (non-dissipative, stable under the RK4 stepper
// at these Courant numbers), second-order one-sided at the outgoing edge;
// the first (psi) and last (psibar) nodes are incoming and get zero rate
// here (frozen or overwritten by the caller).
inline void fermion_rhs(const std::vector<Grassmann>& psi, const std::vector<Grassmann>& psibar,
                        const std::vector<Grassmann>& ch, double h, double m, bool par,
                        std::vector<Grassmann>& dpsi, std::vector<Grassmann>& dpsibar) {
  const long N = long(psi.size()) - 1;
  const double tm = 2.0 * m;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
  for (long j = 0; j <= N; ++j) {
    if (j == 0) {
      dpsi[j] = Grassmann(psi[j].generators());
    } else {
      const Grassmann dpx =
          (j == N) ? (1.0 / (12.0 * h)) * (25.0 * psi[N] - 48.0 * psi[N - 1] + 36.0 * psi[N - 2] -
                                           16.0 * psi[N - 3] + 3.0 * psi[N - 4])
          : (j == 1 || j == N - 1)
              ? (0.5 / h) * (psi[j + 1] - psi[j - 1])
              : (1.0 / (12.0 * h)) *
                    (Cplx(-1.0) * psi[j + 2] + 8.0 * psi[j + 1] - 8.0 * psi[j - 1] + psi[j - 2]);
      dpsi[j] = Cplx(-1.0) * dpx - tm * (psibar[j] * ch[j]);
    }
    if (j == N) {
      dpsibar[j] = Grassmann(psi[j].generators());
    } else {
      const Grassmann dbx =
          (j == 0) ? (-1.0 / (12.0 * h)) * (25.0 * psibar[0] - 48.0 * psibar[1] +
                                            36.0 * psibar[2] - 16.0 * psibar[3] + 3.0 * psibar[4])
          : (j == 1 || j == N - 1)
              ? (0.5 / h) * (psibar[j + 1] - psibar[j - 1])
              : (1.0 / (12.0 * h)) * (Cplx(-1.0) * psibar[j + 2] + 8.0 * psibar[j + 1] -
                                      8.0 * psibar[j - 1] + psibar[j - 2]);
      dpsibar[j] = dbx + tm * (psi[j] * ch[j]);
    }
  }
#ifndef _OPENMP
  (void)par;
#endif
}

inline void cosh_table(const std::vector<Grassmann>& phi, bool par, std::vector<Grassmann>& out) {
  const long N = long(phi.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
  for (long j = 0; j < N; ++j) out[j] = cosh_of(phi[j]);
#ifndef _OPENMP
  (void)par;
#endif
}

inline int pInt(const LatticeLine& ln) { return ln.phi.empty() ? 0 : ln.phi[0].generators(); }

// Second-order-in-time fermion update over one line: classic RK4 where the
// stage mass terms use time-interpolated phi tables and the caller fixes the
// incoming boundary values per stage through `apply_bc(stage_psi, stage_psibar, c)`.
template <class BC>
void fermion_rk4(LatticeLine& ln, const std::vector<Grassmann>& ch0,
                 const std::vector<Grassmann>& chh, const std::vector<Grassmann>& ch1, double h,
                 double dt, double m, bool par, BC&& apply_bc) {
  const size_t N = ln.size();
  std::vector<Grassmann> p = ln.psi, b = ln.psibar;
  std::vector<Grassmann> kp(N, Grassmann(pInt(ln))), kb(N, Grassmann(pInt(ln)));
  std::vector<Grassmann> ap(N, Grassmann(pInt(ln))), ab(N, Grassmann(pInt(ln)));
  std::vector<Grassmann> sp = ln.psi, sb = ln.psibar;

  auto stage = [&](double c, const std::vector<Grassmann>& ch, double kfac, double afac) {
    apply_bc(sp, sb, c);
    fermion_rhs(sp, sb, ch, h, m, par, kp, kb);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
    for (long j = 0; j < long(N); ++j) {
      ap[j] += afac * kp[j];
      ab[j] += afac * kb[j];
      if (kfac != 0.0) {
        sp[j] = p[j] + (kfac * dt) * kp[j];
        sb[j] = b[j] + (kfac * dt) * kb[j];
      }
    }
  };
  stage(0.0, ch0, 0.5, 1.0);
  stage(0.5, chh, 0.5, 2.0);
  stage(0.5, chh, 1.0, 2.0);
  stage(1.0, ch1, 0.0, 1.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
  for (long j = 0; j < long(N); ++j) {
    ln.psi[j] = p[j] + (dt / 6.0) * ap[j];
    ln.psibar[j] = b[j] + (dt / 6.0) * ab[j];
  }
}

// Leapfrog kick: phidot += (dt/2) * accel(phi, fermions) on nodes [1, N-1].
// Fourth-order Laplacian inside, three-point next to boundaries and the
// junction (keeps the junction corrector's neighbor adjustment exact).
inline void boson_kick(LatticeLine& ln, double h, double half_dt, double m, bool par) {
  const long N = long(ln.size()) - 1;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
  for (long j = 1; j < N; ++j) {
    const Grassmann lap =
        (j <= 2 || j >= N - 2)
            ? (1.0 / (h * h)) * (ln.phi[j + 1] - 2.0 * ln.phi[j] + ln.phi[j - 1])
            : (1.0 / (12.0 * h * h)) *
                  (Cplx(-1.0) * ln.phi[j + 2] + 16.0 * ln.phi[j + 1] - 30.0 * ln.phi[j] +
                   16.0 * ln.phi[j - 1] - ln.phi[j - 2]);
    ln.phidot[j] += half_dt * accel(lap, ln.phi[j], ln.psi[j], ln.psibar[j], m);
  }
#ifndef _OPENMP
  (void)par;
#endif
}

inline void boson_drift(LatticeLine& ln, double dt, bool par) {
  const long N = long(ln.size()) - 1;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
  for (long j = 1; j < N; ++j) ln.phi[j] += dt * ln.phidot[j];
#ifndef _OPENMP
  (void)par;
#endif
}

inline void check_finite(const LatticeState& st) {
  if (!std::isfinite(max_abs(st.lambda0)) || !std::isfinite(max_abs(st.s1.phi[st.j1()])) ||
      !std::isfinite(max_abs(st.s2.phi[0])))
    throw std::runtime_error("sim: non-finite junction data");
}

}  // namespace sim_detail

// One time step t -> t + dt.  Junction variables advance by Heun with the
// interior supplying the outgoing characteristics at both stage times.
inline void step(LatticeState& st, const SimParams& pm) {
  using namespace sim_detail;
  const double dt = st.dt, h = st.dx;
  const size_t J = st.j1();
  const int n = st.n;
  const bool par = pm.parallel;

  const JunctionRates A = junction_rates(st, pm);
  // Euler-predicted junction variables; stage values interpolate linearly.
  const Grassmann phi1_0 = st.s1.phi[J], phi2_0 = st.s2.phi[0];
  const Grassmann l0_0 = st.lambda0, f1_0 = st.f1, f1t_0 = st.f1t;
  const Grassmann v1_0 = st.v1j, u2_0 = st.u2j;

  // --- boson: kick with a(t), drift, junction predictor, final kick below.
  boson_kick(st.s1, h, 0.5 * dt, pm.m, par);
  boson_kick(st.s2, h, 0.5 * dt, pm.m, par);
  std::vector<Grassmann> phi1_old = st.s1.phi, phi2_old = st.s2.phi;
  boson_drift(st.s1, dt, par);
  boson_drift(st.s2, dt, par);
  st.s1.phi[J] = phi1_0 + dt * A.dphi1;
  st.s2.phi[0] = phi2_0 + dt * A.dphi2;

  // --- fermions: RK4 with interpolated cosh(phi) tables and per-stage
  // sewing of the incoming junction values.
  const DefectParams prm = pm.defect();
  std::vector<Grassmann> ch0_1(st.s1.size(), Grassmann(n)), chh_1 = ch0_1, ch1_1 = ch0_1;
  std::vector<Grassmann> ch0_2(st.s2.size(), Grassmann(n)), chh_2 = ch0_2, ch1_2 = ch0_2;
  {
    std::vector<Grassmann> half1 = phi1_old, half2 = phi2_old;
    for (size_t j = 0; j < half1.size(); ++j) half1[j] = 0.5 * (phi1_old[j] + st.s1.phi[j]);
    for (size_t j = 0; j < half2.size(); ++j) half2[j] = 0.5 * (phi2_old[j] + st.s2.phi[j]);
    cosh_table(phi1_old, par, ch0_1);
    cosh_table(half1, par, chh_1);
    cosh_table(st.s1.phi, par, ch1_1);
    cosh_table(phi2_old, par, ch0_2);
    cosh_table(half2, par, chh_2);
    cosh_table(st.s2.phi, par, ch1_2);
  }
  auto junction_fields = [&](double c) {
    struct Jf {
      Grassmann phi1, phi2, l0, f1, f1t;
    } jf{phi1_0 + (c * dt) * A.dphi1, phi2_0 + (c * dt) * A.dphi2, l0_0 + (c * dt) * A.dlambda0,
         f1_0 + (c * dt) * A.df1, f1t_0 + (c * dt) * A.df1t};
    return jf;
  };
  // The two lines are advanced together so the junction sewing can couple the
  // stage values of the outgoing fermions on both sides.
  {
    LatticeLine& a = st.s1;
    LatticeLine& b = st.s2;
    const size_t Na = a.size(), Nb = b.size();
    std::vector<Grassmann> pa = a.psi, ba = a.psibar, pb = b.psi, bb = b.psibar;
    std::vector<Grassmann> spa = pa, sba = ba, spb = pb, sbb = bb;
    std::vector<Grassmann> kpa(Na, Grassmann(n)), kba(Na, Grassmann(n));
    std::vector<Grassmann> kpb(Nb, Grassmann(n)), kbb(Nb, Grassmann(n));
    std::vector<Grassmann> apa(Na, Grassmann(n)), aba(Na, Grassmann(n));
    std::vector<Grassmann> apb(Nb, Grassmann(n)), abb(Nb, Grassmann(n));

    auto stage = [&](double c, const std::vector<Grassmann>& cha, const std::vector<Grassmann>& chb,
                     double kfac, double afac) {
      const auto jf = junction_fields(c);
      const Sewing s = sew(jf.phi1, jf.phi2, jf.l0, jf.f1, jf.f1t, spa[J], sbb[0], prm);
      sba[J] = sbb[0] + s.psibm;  // incoming psibar on side 1
      spb[0] = spa[J] - s.psim;   // incoming psi on side 2
      fermion_rhs(spa, sba, cha, h, pm.m, par, kpa, kba);
      fermion_rhs(spb, sbb, chb, h, pm.m, par, kpb, kbb);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
      for (long j = 0; j < long(Na); ++j) {
        apa[j] += afac * kpa[j];
        aba[j] += afac * kba[j];
        if (kfac != 0.0) {
          spa[j] = pa[j] + (kfac * dt) * kpa[j];
          sba[j] = ba[j] + (kfac * dt) * kba[j];
        }
      }
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
      for (long j = 0; j < long(Nb); ++j) {
        apb[j] += afac * kpb[j];
        abb[j] += afac * kbb[j];
        if (kfac != 0.0) {
          spb[j] = pb[j] + (kfac * dt) * kpb[j];
          sbb[j] = bb[j] + (kfac * dt) * kbb[j];
        }
      }
    };
    stage(0.0, ch0_1, ch0_2, 0.5, 1.0);
    stage(0.5, chh_1, chh_2, 0.5, 2.0);
    stage(0.5, chh_1, chh_2, 1.0, 2.0);
    stage(1.0, ch1_1, ch1_2, 0.0, 1.0);
    for (size_t j = 0; j < Na; ++j) {
      a.psi[j] = pa[j] + (dt / 6.0) * apa[j];
      a.psibar[j] = ba[j] + (dt / 6.0) * aba[j];
    }
    for (size_t j = 0; j < Nb; ++j) {
      b.psi[j] = pb[j] + (dt / 6.0) * apb[j];
      b.psibar[j] = bb[j] + (dt / 6.0) * abb[j];
    }
  }

  // --- boson: final kick with a(t + dt) and the updated fermions.
  boson_kick(st.s1, h, 0.5 * dt, pm.m, par);
  boson_kick(st.s2, h, 0.5 * dt, pm.m, par);

  // --- junction corrector (Heun) with the updated interior.  Two passes:
  // when the junction phi moves off its Euler prediction, the neighbors'
  // final kick is adjusted exactly (the Laplacian is linear in phi[J]), and
  // the corrector rates are re-evaluated with the adjusted interior.
  st.v1j = v1_0 + dt * A.dv1j;
  st.u2j = u2_0 + dt * A.du2j;
  st.t += dt;
  for (int pass = 0; pass < 2; ++pass) {
    const JunctionRates B = junction_rates(st, pm);
    const Grassmann phi1_new = phi1_0 + (0.5 * dt) * (A.dphi1 + B.dphi1);
    const Grassmann phi2_new = phi2_0 + (0.5 * dt) * (A.dphi2 + B.dphi2);
    st.s1.phidot[J - 1] += (0.5 * dt / (h * h)) * (phi1_new - st.s1.phi[J]);
    st.s2.phidot[1] += (0.5 * dt / (h * h)) * (phi2_new - st.s2.phi[0]);
    st.s1.phi[J] = phi1_new;
    st.s2.phi[0] = phi2_new;
    st.lambda0 = l0_0 + (0.5 * dt) * (A.dlambda0 + B.dlambda0);
    st.f1 = f1_0 + (0.5 * dt) * (A.df1 + B.df1);
    st.f1t = f1t_0 + (0.5 * dt) * (A.df1t + B.df1t);
    st.v1j = v1_0 + (0.5 * dt) * (A.dv1j + B.dv1j);
    st.u2j = u2_0 + (0.5 * dt) * (A.du2j + B.du2j);
  }
  sync_junction(st, pm);
  sim_detail::check_finite(st);
}

// ---------------------------------------------------------------------------
// Initial data from the analytic one-soliton defect solution.

namespace sim_detail {

// Continue the log branch of a phi profile away from an anchor node so the
// lattice field is smooth even where the principal branch jumps by 2 pi i.
inline void unwrap_from(std::vector<Grassmann>& phi, size_t anchor) {
  const double tp = 2.0 * M_PI;
  auto fix = [&](size_t j, size_t prev) {
    const double gap = phi[j][0].imag() - phi[prev][0].imag();
    const double shift = tp * std::round(gap / tp);
    if (shift != 0.0) phi[j][0] -= Cplx(0.0, shift);
  };
  for (size_t j = anchor; j + 1 < phi.size(); ++j) fix(j + 1, j);
  for (size_t j = anchor; j > 0; --j) fix(j - 1, j);
}

}  // namespace sim_detail

inline LatticeState init_soliton(const SimParams& pm, const SolitonParams& sp, Cplx z, double t0) {
  pm.validate();
  const int N = int(std::lround(pm.L / pm.dx));
  const int n = pm.gen_count;
  LatticeState st;
  st.dx = pm.dx;
  st.dt = pm.dt();
  st.t = t0;
  st.n = n;
  auto fill = [&](LatticeLine& ln, int side, double x0) {
    ln.phi.resize(N + 1, Grassmann(n));
    ln.phidot.resize(N + 1, Grassmann(n));
    ln.psi.resize(N + 1, Grassmann(n));
    ln.psibar.resize(N + 1, Grassmann(n));
    for (int j = 0; j <= N; ++j) {
      const BulkPoint p = eval_solution(side, x0 + j * pm.dx, t0, sp, z, z);
      ln.phi[j] = p.phi;
      ln.phidot[j] = *p.dt_phi;
      ln.psi[j] = p.psi;
      ln.psibar[j] = p.psibar;
    }
  };
  fill(st.s1, 1, -pm.L);
  fill(st.s2, 2, 0.0);
  // Anchor the branch at the junction, where the defect data live.
  sim_detail::unwrap_from(st.s1.phi, size_t(N));
  sim_detail::unwrap_from(st.s2.phi, 0);

  const AuxPoint a = aux_analytic(0.0, t0, sp, z, z);
  st.lambda0 = a.lambda0;
  st.f1 = a.f1;
  st.f1t = a.f1t;
  const BulkPoint p1 = eval_solution(1, 0.0, t0, sp, z, z);
  const BulkPoint p2 = eval_solution(2, 0.0, t0, sp, z, z);
  st.v1j = *p1.dt_phi - *p1.dx_phi;
  st.u2j = *p2.dt_phi + *p2.dx_phi;
  sync_junction(st, pm);
  return st;
}

// Vacuum of the defect theory: phi1 = 0, phi2 = i pi,
// lambda0 = log(m / (w1 w2)) + i pi / 2, everything else zero.  This
// configuration is a fixed point of the evolution.
inline LatticeState init_vacuum(const SimParams& pm, double t0) {
  pm.validate();
  const int N = int(std::lround(pm.L / pm.dx));
  const int n = pm.gen_count;
  LatticeState st;
  st.dx = pm.dx;
  st.dt = pm.dt();
  st.t = t0;
  st.n = n;
  auto fill = [&](LatticeLine& ln, Cplx phi0) {
    ln.phi.assign(N + 1, Grassmann::scalar(n, phi0));
    ln.phidot.assign(N + 1, Grassmann(n));
    ln.psi.assign(N + 1, Grassmann(n));
    ln.psibar.assign(N + 1, Grassmann(n));
  };
  fill(st.s1, 0.0);
  fill(st.s2, Cplx(0.0, M_PI));
  st.lambda0 = Grassmann::scalar(n, std::log(pm.m / (pm.w1 * pm.w2)) + Cplx(0.0, M_PI / 2.0));
  st.f1 = Grassmann(n);
  st.f1t = Grassmann(n);
  st.v1j = Grassmann(n);
  st.u2j = Grassmann(n);
  return st;
}

// ---------------------------------------------------------------------------
// Charge monitoring.

struct ChargeRecord {
  Grassmann E, P, Q, Qbar;              // bulk quadrature over both half-lines
  Grassmann E_D, P_D, Q_D, Qbar_D;      // defect corrections
  Grassmann total_E, total_P, total_Q, total_Qbar;
};

namespace sim_detail {

// Composite Simpson weight for node j of N intervals (Simpson 3/8 on the
// final panel when N is odd; trapezoid for tiny lattices).
inline double quad_weight(size_t j, size_t N) {
  if (N < 4) return (j == 0 || j == N) ? 0.5 : 1.0;
  const size_t M = (N % 2 == 0) ? N : N - 3;  // plain Simpson up to node M
  double w = 0.0;
  if (j <= M) w += (j == 0 || j == M) ? 1.0 / 3.0 : ((j % 2 == 1) ? 4.0 / 3.0 : 2.0 / 3.0);
  if (N % 2 == 1 && j >= M)  // Simpson 3/8 over the last three intervals
    w += (j == M || j == N) ? 3.0 / 8.0 : 9.0 / 8.0;
  return w;
}

inline BulkPoint node_point(const LatticeLine& ln, size_t j, double h) {
  const size_t N = ln.size() - 1;
  auto dx_of = [&](const std::vector<Grassmann>& f) {
    if (j == 0) return (0.5 / h) * (-3.0 * f[0] + 4.0 * f[1] - f[2]);
    if (j == N) return (0.5 / h) * (3.0 * f[N] - 4.0 * f[N - 1] + f[N - 2]);
    if (j == 1 || j == N - 1) return (0.5 / h) * (f[j + 1] - f[j - 1]);
    return (1.0 / (12.0 * h)) *
           (Cplx(-1.0) * f[j + 2] + 8.0 * f[j + 1] - 8.0 * f[j - 1] + f[j - 2]);
  };
  BulkPoint p{ln.phi[j], ln.psi[j], ln.psibar[j]};
  p.dx_phi = dx_of(ln.phi);
  p.dt_phi = ln.phidot[j];
  p.dx_psi = dx_of(ln.psi);
  p.dx_psibar = dx_of(ln.psibar);
  return p;
}

}  // namespace sim_detail

inline ChargeRecord total_charges(const LatticeState& st, const SimParams& pm) {
  const ModelParams mp{pm.m};
  const int n = st.n;
  ChargeRecord rec{Grassmann(n), Grassmann(n), Grassmann(n), Grassmann(n),
                   Grassmann(n), Grassmann(n), Grassmann(n), Grassmann(n),
                   Grassmann(n), Grassmann(n), Grassmann(n), Grassmann(n)};
  auto side_sum = [&](const LatticeLine& ln) {
    const size_t N = ln.size() - 1;
    std::array<Grassmann, 4> acc{Grassmann(n), Grassmann(n), Grassmann(n), Grassmann(n)};
    for (size_t j = 0; j <= N; ++j) {
      const ChargeDensities d = charge_densities(sim_detail::node_point(ln, j, st.dx), mp);
      const double w = sim_detail::quad_weight(j, N);
      acc[0] += (w * st.dx) * d.energy;
      acc[1] += (w * st.dx) * d.momentum;
      acc[2] += (w * st.dx) * d.supercharge;
      acc[3] += (w * st.dx) * d.supercharge_bar;
    }
    return acc;
  };
  const auto a1 = side_sum(st.s1), a2 = side_sum(st.s2);
  rec.E = a1[0] + a2[0];
  rec.P = a1[1] + a2[1];
  rec.Q = a1[2] + a2[2];
  rec.Qbar = a1[3] + a2[3];

  DefectState ds{sim_detail::node_point(st.s1, st.j1(), st.dx),
                 sim_detail::node_point(st.s2, 0, st.dx), st.lambda0, st.f1, st.f1t};
  const DefectCharges dc = modified_charges(ds, pm.defect());
  rec.E_D = dc.E_D;
  rec.P_D = dc.P_D;
  rec.Q_D = dc.Q_D;
  rec.Qbar_D = dc.Qbar_D;
  rec.total_E = rec.E + rec.E_D;
  rec.total_P = rec.P + rec.P_D;
  rec.total_Q = rec.Q + rec.Q_D;
  rec.total_Qbar = rec.Qbar + rec.Qbar_D;
  return rec;
}

// Max sewing-condition residual at the junction with the currently stored
// derivative data (a per-step consistency diagnostic, not exactly zero on a
// lattice).
inline double junction_residual(const LatticeState& st, const SimParams& pm) {
  const JunctionRates r = junction_rates(st, pm);
  DefectState ds{sim_detail::node_point(st.s1, st.j1(), st.dx),
                 sim_detail::node_point(st.s2, 0, st.dx), st.lambda0, st.f1, st.f1t};
  ds.dt_lambda0 = r.dlambda0;
  ds.dt_f1 = r.df1;
  ds.dt_f1t = r.df1t;
  double worst = 0.0;
  for (const auto& g : defect_condition_residuals(ds, pm.defect(), DefectForm::omega))
    worst = std::max(worst, max_abs(g));
  return worst;
}

inline bool grading_ok(const LatticeState& st) {
  auto even = [](const Grassmann& g) { return max_abs(g) == 0.0 || is_even(g); };
  auto odd = [](const Grassmann& g) { return max_abs(g) == 0.0 || is_odd(g); };
  for (const LatticeLine* ln : {&st.s1, &st.s2})
    for (size_t j = 0; j < ln->size(); ++j)
      if (!even(ln->phi[j]) || !even(ln->phidot[j]) || !odd(ln->psi[j]) || !odd(ln->psibar[j]))
        return false;
  return even(st.lambda0) && even(st.v1j) && even(st.u2j) && odd(st.f1) && odd(st.f1t);
}

// ---------------------------------------------------------------------------
// Delay measurement: fit E2 = z R1 e^{a x + b t} on the transmitted side
// through the tau-function ratio.  With the side-2 profile convention
// e^{phi2} = -(1 + E2) / (1 - E2), the linear-in-E2 combination is
// (1 + e^{phi2}) / (1 - e^{phi2}) = -E2 (it vanishes in the vacuum).

inline Cplx measure_delay(const LatticeState& st, const SolitonParams& sp, double lo = 1e-3,
                          double hi = 0.2) {
  Cplx num = 0.0;
  double den = 0.0;
  int count = 0;
  for (size_t j = 0; j < st.s2.size(); ++j) {
    const double x = double(j) * st.dx;
    const Cplx g = sp.R1 * std::exp(sp.a() * x + sp.b() * st.t);
    if (std::abs(g) < lo || std::abs(g) > hi) continue;
    const Cplx ephi = std::exp(st.s2.phi[j][0]);
    const Cplx y = (1.0 + ephi) / (1.0 - ephi);
    num += std::conj(g) * (-y);
    den += std::norm(g);
    ++count;
  }
  if (count < 8 || den < 1e-12) throw std::runtime_error("delay fit: window poorly conditioned");
  return num / den;
}

// ---------------------------------------------------------------------------
// Free bulk lattice (no defect) on a single line; used as the convergence
// reference for the interior scheme.

struct FreeLattice {
  double x0 = 0.0, dx = 0.0, dt = 0.0, t = 0.0;
  LatticeLine line;
};

inline FreeLattice init_free_soliton(double x0, double x1, double dx, double cfl,
                                     const SolitonParams& sp, Cplx z, double t0) {
  FreeLattice fl;
  fl.x0 = x0;
  fl.dx = dx;
  fl.dt = cfl * dx;
  fl.t = t0;
  const int N = int(std::lround((x1 - x0) / dx));
  const int n = sp.gen_count;
  fl.line.phi.resize(N + 1, Grassmann(n));
  fl.line.phidot.resize(N + 1, Grassmann(n));
  fl.line.psi.resize(N + 1, Grassmann(n));
  fl.line.psibar.resize(N + 1, Grassmann(n));
  for (int j = 0; j <= N; ++j) {
    const BulkPoint p = eval_solution(1, x0 + j * dx, t0, sp, z, z);
    fl.line.phi[j] = p.phi;
    fl.line.phidot[j] = *p.dt_phi;
    fl.line.psi[j] = p.psi;
    fl.line.psibar[j] = p.psibar;
  }
  sim_detail::unwrap_from(fl.line.phi, 0);
  return fl;
}

inline void free_step(FreeLattice& fl, double m, bool par = true) {
  using namespace sim_detail;
  const double dt = fl.dt, h = fl.dx;
  LatticeLine& ln = fl.line;
  boson_kick(ln, h, 0.5 * dt, m, par);
  std::vector<Grassmann> phi_old = ln.phi;
  boson_drift(ln, dt, par);
  const size_t N = ln.size() - 1;
  std::vector<Grassmann> ch0(N + 1), chh(N + 1), ch1(N + 1);
  std::vector<Grassmann> half = phi_old;
  for (size_t j = 0; j <= N; ++j) half[j] = 0.5 * (phi_old[j] + ln.phi[j]);
  cosh_table(phi_old, par, ch0);
  cosh_table(half, par, chh);
  cosh_table(ln.phi, par, ch1);
  fermion_rk4(ln, ch0, chh, ch1, h, dt, m, par,
              [](std::vector<Grassmann>&, std::vector<Grassmann>&, double) {});
  boson_kick(ln, h, 0.5 * dt, m, par);
  fl.t += dt;
}

inline Grassmann free_energy(const FreeLattice& fl, double m) {
  const ModelParams mp{m};
  const size_t N = fl.line.size() - 1;
  Grassmann acc(fl.line.phi[0].generators());
  for (size_t j = 0; j <= N; ++j) {
    const ChargeDensities d = charge_densities(sim_detail::node_point(fl.line, j, fl.dx), mp);
    acc += (sim_detail::quad_weight(j, N) * fl.dx) * d.energy;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Serialization: time-series CSV rows and JSON checkpoints.

struct SeriesRow {
  double t = 0.0;
  ChargeRecord charges;
  double residual = 0.0;
};

inline void write_series_csv(const std::string& path, const std::vector<SeriesRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "t,re_E,im_E,re_P,im_P,re_Q,im_Q,re_Qbar,im_Qbar,"
         "re_E_D,im_E_D,re_P_D,im_P_D,re_Q_D,im_Q_D,re_Qbar_D,im_Qbar_D,"
         "re_total_E,im_total_E,re_total_P,im_total_P,"
         "re_total_Q,im_total_Q,re_total_Qbar,im_total_Qbar,max_residual\n";
  auto body = [](const Grassmann& g) { return g[0]; };
  auto soul = [](const Grassmann& g) {
    // Odd charges have no body; report the first-generator coefficient.
    return g.generators() > 0 ? g[1] : Cplx(0.0);
  };
  out.precision(16);
  for (const SeriesRow& r : rows) {
    auto put = [&](Cplx c) { out << "," << c.real() << "," << c.imag(); };
    out << r.t;
    put(body(r.charges.E));
    put(body(r.charges.P));
    put(soul(r.charges.Q));
    put(soul(r.charges.Qbar));
    put(body(r.charges.E_D));
    put(body(r.charges.P_D));
    put(soul(r.charges.Q_D));
    put(soul(r.charges.Qbar_D));
    put(body(r.charges.total_E));
    put(body(r.charges.total_P));
    put(soul(r.charges.total_Q));
    put(soul(r.charges.total_Qbar));
    out << "," << r.residual << "\n";
  }
}

inline nlohmann::json to_json(const Grassmann& g) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (unsigned k = 0; k < g.size(); ++k) coeffs.push_back({g[k].real(), g[k].imag()});
  return {{"n", g.generators()}, {"coeffs", coeffs}};
}

inline Grassmann grassmann_from_json(const nlohmann::json& j) {
  Grassmann g(j.at("n").get<int>());
  const auto& c = j.at("coeffs");
  for (unsigned k = 0; k < g.size(); ++k) g[k] = Cplx(c[k][0].get<double>(), c[k][1].get<double>());
  return g;
}

inline nlohmann::json checkpoint_json(const LatticeState& st) {
  auto line = [](const LatticeLine& ln) {
    nlohmann::json j;
    for (const char* name : {"phi", "phidot", "psi", "psibar"}) j[name] = nlohmann::json::array();
    for (size_t k = 0; k < ln.size(); ++k) {
      j["phi"].push_back(to_json(ln.phi[k]));
      j["phidot"].push_back(to_json(ln.phidot[k]));
      j["psi"].push_back(to_json(ln.psi[k]));
      j["psibar"].push_back(to_json(ln.psibar[k]));
    }
    return j;
  };
  return {{"dx", st.dx},           {"dt", st.dt},
          {"t", st.t},             {"n", st.n},
          {"s1", line(st.s1)},     {"s2", line(st.s2)},
          {"lambda0", to_json(st.lambda0)},
          {"f1", to_json(st.f1)},  {"f1t", to_json(st.f1t)},
          {"v1j", to_json(st.v1j)},{"u2j", to_json(st.u2j)}};
}

inline LatticeState checkpoint_from_json(const nlohmann::json& j) {
  LatticeState st;
  st.dx = j.at("dx").get<double>();
  st.dt = j.at("dt").get<double>();
  st.t = j.at("t").get<double>();
  st.n = j.at("n").get<int>();
  auto line = [](const nlohmann::json& lj) {
    LatticeLine ln;
    for (const auto& e : lj.at("phi")) ln.phi.push_back(grassmann_from_json(e));
    for (const auto& e : lj.at("phidot")) ln.phidot.push_back(grassmann_from_json(e));
    for (const auto& e : lj.at("psi")) ln.psi.push_back(grassmann_from_json(e));
    for (const auto& e : lj.at("psibar")) ln.psibar.push_back(grassmann_from_json(e));
    return ln;
  };
  st.s1 = line(j.at("s1"));
  st.s2 = line(j.at("s2"));
  st.lambda0 = grassmann_from_json(j.at("lambda0"));
  st.f1 = grassmann_from_json(j.at("f1"));
  st.f1t = grassmann_from_json(j.at("f1t"));
  st.v1j = grassmann_from_json(j.at("v1j"));
  st.u2j = grassmann_from_json(j.at("u2j"));
  return st;
}

}  // namespace sshg
