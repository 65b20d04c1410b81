#pragma once

// Fusing of two type-I integrable defects into the type-II defect of the
// N=1 supersymmetric sinh-Gordon model: the type-I defect Lagrangian, the
// merged two-defect Lagrangian, elimination of the Lagrange-multiplier
// fermions, the mu/nu structure functions with the fermion rotation
// (g1,g2) -> (f1,f1t), the auxiliary-boson shifts, and the full pipeline
// whose static part reproduces the fused type-II defect potentials.

#include <optional>
#include <stdexcept>
#include <utility>

#include "sshg/grassmann.hpp"

namespace sshg {

// One type-I defect: its parameter sigma_k, its fermionic degree of freedom
// g_k, the shared auxiliary triplet (phi0, psi0, psibar0) and the attached
// bulk triplet (phi_k, psi_k, psibar_k).
struct TypeIDefect {
  Cplx sigma;
  Grassmann g;
  Grassmann phi0, psi0, psibar0;
  Grassmann phik, psik, psibark;
  std::optional<Grassmann> dt_phi0, dt_phik, dt_g;

  const Grassmann& need(const std::optional<Grassmann>& slot, const char* what) const {
    if (!slot) throw std::invalid_argument(std::string("type-I defect: missing slot ") + what);
    return *slot;
  }
};

// Defect potentials of a single type-I defect (k = 1 or 2).
inline std::pair<Grassmann, Grassmann> type1_potentials(int k, const TypeIDefect& d, double m) {
  const Cplx i(0.0, 1.0);
  const Cplx rsk = std::sqrt(d.sigma);
  const double sgn = (k == 1) ? 1.0 : -1.0;  // -(-1)^k
  const Grassmann B0 = (m * d.sigma) * cosh_of(d.phi0 + d.phik) + (m / d.sigma) * cosh_of(d.phi0 - d.phik);
  const Grassmann B1 =
      (2.0 * i * std::sqrt(m)) *
      (rsk * (cosh_of(Cplx(0.5) * (d.phi0 + d.phik)) * d.g * (d.psibar0 + d.psibark)) +
       (sgn / rsk) * (cosh_of(Cplx(0.5) * (d.phi0 - d.phik)) * d.g * (d.psi0 - d.psik)));
  return {B0, B1};
}

// Full type-I defect Lagrangian density L_{D_k}.
inline Grassmann type1_lagrangian(int k, const TypeIDefect& d, double m) {
  const Cplx i(0.0, 1.0);
  const double sup = (k == 1) ? 1.0 : -1.0;  // -(-1)^k
  const auto [B0, B1] = type1_potentials(k, d, m);
  return Cplx(0.5) * (d.phi0 * d.need(d.dt_phik, "dt_phik") - d.phik * d.need(d.dt_phi0, "dt_phi0")) -
         i * (d.psik * d.psi0) - i * (d.psibark * d.psibar0) +
         sup * ((2.0 * i) * (d.g * d.need(d.dt_g, "dt_g")) + B0 + B1);
}

// Closed forms for the Lagrange-multiplier fermions of the merged defect:
// psi0/psibar0 from the boundary sewing, psi-/psibar- from the stationarity
// of the merged Lagrangian with respect to psi0/psibar0.
struct Psi0Elimination {
  Grassmann psi0, psibar0, psim, psibarm;
};

inline Psi0Elimination eliminate_psi0(const Grassmann& phi0, const Grassmann& phi1, const Grassmann& phi2,
                                      const Grassmann& psip, const Grassmann& psibp, const Grassmann& g1,
                                      const Grassmann& g2, Cplx rs1, Cplx rs2, double m) {
  // rs1, rs2 are the square roots of sigma_1, sigma_2 (passed explicitly so
  // the caller controls the branch).
  const double rm = std::sqrt(m);
  const Grassmann chm1 = cosh_of(Cplx(0.5) * (phi0 - phi1)), chm2 = cosh_of(Cplx(0.5) * (phi0 - phi2));
  const Grassmann chp1 = cosh_of(Cplx(0.5) * (phi0 + phi1)), chp2 = cosh_of(Cplx(0.5) * (phi0 + phi2));
  Psi0Elimination out;
  out.psi0 = Cplx(-0.5) * psip + rm * ((1.0 / rs1) * (chm1 * g1) + (1.0 / rs2) * (chm2 * g2));
  out.psibar0 = Cplx(0.5) * psibp - rm * (rs1 * (chp1 * g1) - rs2 * (chp2 * g2));
  out.psim = (2.0 * rm) * ((1.0 / rs1) * (chm1 * g1) - (1.0 / rs2) * (chm2 * g2));
  out.psibarm = (2.0 * rm) * (rs1 * (chp1 * g1) + rs2 * (chp2 * g2));
  return out;
}

// Structure functions of the fermion rotation.  nu1, nu2 are taken from
// their square-root closed forms; the branch is checked against the exact
// relations mu1 nu2 = e^{phi-/2} and mu2 nu1 = e^{-phi-/2}.
struct MuNu {
  Grassmann mu1, mu2, nu1, nu2;
};

inline MuNu mu_nu(const Grassmann& phim, Cplx tau) {
  const int n = phim.generators();
  const Grassmann one = Grassmann::scalar(n, 1.0);
  const Grassmann e1 = exp_of(Cplx(-1.0) * phim + (2.0 * tau) * one);  // e^{-(phi- - 2 tau)}
  const Grassmann e2 = exp_of(phim - (2.0 * tau) * one);
  MuNu out;
  out.mu1 = sqrt_of(Cplx(2.0) * inverse_of(one + e1));
  out.mu2 = sqrt_of(Cplx(2.0) * inverse_of(one + e2));
  out.nu1 = sqrt_of(Cplx(0.5) * (exp_of(Cplx(-1.0) * phim) + std::exp(-2.0 * tau) * one));
  out.nu2 = sqrt_of(Cplx(0.5) * (exp_of(phim) + std::exp(2.0 * tau) * one));
  if (max_abs(out.mu1 * out.nu2 - exp_of(Cplx(0.5) * phim)) > 1e-8 ||
      max_abs(out.mu2 * out.nu1 - exp_of(Cplx(-0.5) * phim)) > 1e-8)
    throw std::domain_error("mu_nu: square-root branches are inconsistent at this point");
  return out;
}

// mu1, mu2 together with their time derivatives given a jet for phi-.
struct MuNuJet : MuNu {
  Grassmann dt_mu1, dt_mu2;
};

inline MuNuJet mu_nu_jet(const Grassmann& phim, const Grassmann& dt_phim, Cplx tau) {
  const int n = phim.generators();
  const Grassmann one = Grassmann::scalar(n, 1.0);
  const Grassmann e1 = exp_of(Cplx(-1.0) * phim + (2.0 * tau) * one);
  const Grassmann e2 = exp_of(phim - (2.0 * tau) * one);
  MuNuJet out;
  static_cast<MuNu&>(out) = mu_nu(phim, tau);
  out.dt_mu1 = Cplx(0.5) * (out.mu1 * e1 * inverse_of(one + e1) * dt_phim);
  out.dt_mu2 = Cplx(-0.5) * (out.mu2 * e2 * inverse_of(one + e2) * dt_phim);
  return out;
}

// The fermion rotation (f1, f1t) -> (g1, g2).
inline std::pair<Grassmann, Grassmann> g_from_f(const MuNu& mn, const Grassmann& f1,
                                                const Grassmann& f1t) {
  return {Cplx(0.5) * (mn.mu1 * f1) - Cplx(0.5) * (mn.mu2 * f1t),
          Cplx(0.5) * (mn.mu2 * f1) + Cplx(0.5) * (mn.mu1 * f1t)};
}

// Merged bosonic defect potential of the two-defect system, written in the
// four-exponential form (phi0 not yet shifted).
inline Grassmann fused_B0(const Grassmann& phip, const Grassmann& phim, const Grassmann& phi0, Cplx sigma1,
                          Cplx sigma2, double m) {
  const Grassmann eh = exp_of(Cplx(0.5) * phim), emh = exp_of(Cplx(-0.5) * phim);
  const Grassmann ep = exp_of(Cplx(0.5) * phip + phi0), emp = exp_of(Cplx(-0.5) * phip - phi0);
  const Grassmann eq = exp_of(Cplx(0.5) * phip - phi0), emq = exp_of(Cplx(-0.5) * phip + phi0);
  return (m / 2.0) * (ep * (sigma1 * eh + sigma2 * emh) + emp * (sigma1 * emh + sigma2 * eh) +
                      eq * ((1.0 / sigma1) * eh + (1.0 / sigma2) * emh) +
                      emq * ((1.0 / sigma1) * emh + (1.0 / sigma2) * eh));
}

// Merged fermionic defect potential B1 = B1^{(1)} + B1^{(2)}.
inline Grassmann fused_B1(const Grassmann& phip, const Grassmann& phim, const Grassmann& phi0,
                          const Grassmann& psi0, const Grassmann& psibar0, const Grassmann& psi1,
                          const Grassmann& psi2, const Grassmann& psibar1, const Grassmann& psibar2,
                          const Grassmann& g1, const Grassmann& g2, Cplx rs1, Cplx rs2, double m) {
  const Cplx i(0.0, 1.0);
  const Grassmann eq = exp_of(Cplx(0.25) * phim), emq = exp_of(Cplx(-0.25) * phim);
  const Grassmann ep = exp_of(Cplx(0.25) * phip + Cplx(0.5) * phi0);
  const Grassmann emp = exp_of(Cplx(-0.25) * phip - Cplx(0.5) * phi0);
  const Grassmann er = exp_of(Cplx(0.25) * phip - Cplx(0.5) * phi0);
  const Grassmann emr = exp_of(Cplx(-0.25) * phip + Cplx(0.5) * phi0);
  const Grassmann a1 = g1 * (psibar0 + psibar1), a2 = g2 * (psibar0 + psibar2);
  const Grassmann b1 = g1 * (psi0 - psi1), b2 = g2 * (psi2 - psi0);
  return (i * std::sqrt(m)) * (ep * (rs1 * (eq * a1) + rs2 * (emq * a2)) +
                               emp * (rs1 * (emq * a1) + rs2 * (eq * a2)) +
                               er * ((1.0 / rs1) * (eq * b1) + (1.0 / rs2) * (emq * b2)) +
                               emr * ((1.0 / rs1) * (emq * b1) + (1.0 / rs2) * (eq * b2)));
}

// ---------------------------------------------------------------------------
// The full fusing pipeline.
// ---------------------------------------------------------------------------

struct FuseInputs {
  Grassmann phi1, phi2, psi1, psi2, psibar1, psibar2;
  Grassmann lambda0, f1, f1t;
};

struct FuseResult {
  Grassmann phi0;                 // auxiliary boson after both shifts
  Grassmann g1, g2;               // rotated defect fermions
  Grassmann psi0, psibar0;        // eliminated Lagrange multipliers
  Grassmann psim, psibarm;        // sewing values of psi-, psibar-
  Grassmann lagrangian_static;    // defect Lagrangian with all time derivatives zero
};

// Evaluate the merged two-defect Lagrangian at a point, with the parameter
// identifications sigma_1 = sigma e^{-tau}, sigma_2 = sigma e^{tau}, the
// auxiliary-boson substitution
//   phi0 = -(lambda0 + i f1 f1t / (2 cosh(phi-/2 - tau))) + phi+/2
//          - ln cosh(phi-/2 - tau),
// the fermion rotation, and the psi0/psibar0 elimination.  All time
// derivatives are set to zero, so the kinetic terms drop and the static
// part can be compared with the type-II potentials directly.
inline FuseResult fuse(const FuseInputs& in, Cplx sigma, Cplx tau, double m) {
  const int n = in.phi1.generators();
  const Cplx i(0.0, 1.0);
  const Grassmann one = Grassmann::scalar(n, 1.0);
  const Cplx rs = std::sqrt(sigma);
  const Cplx rs1 = rs * std::exp(-0.5 * tau), rs2 = rs * std::exp(0.5 * tau);
  const Cplx sigma1 = sigma * std::exp(-tau), sigma2 = sigma * std::exp(tau);

  const Grassmann phip = in.phi1 + in.phi2, phim = in.phi1 - in.phi2;
  const Grassmann psip = in.psi1 + in.psi2, psibp = in.psibar1 + in.psibar2;
  const Grassmann chm = cosh_of(Cplx(0.5) * phim - tau * one);

  FuseResult out;
  out.phi0 = Cplx(-1.0) * in.lambda0 - (i / 2.0) * (inverse_of(chm) * in.f1 * in.f1t) +
             Cplx(0.5) * phip - log_of(chm);
  const MuNu mn = mu_nu(phim, tau);
  std::tie(out.g1, out.g2) = g_from_f(mn, in.f1, in.f1t);
  const Psi0Elimination el =
      eliminate_psi0(out.phi0, in.phi1, in.phi2, psip, psibp, out.g1, out.g2, rs1, rs2, m);
  out.psi0 = el.psi0;
  out.psibar0 = el.psibar0;
  out.psim = el.psim;
  out.psibarm = el.psibarm;

  const Grassmann B0 = fused_B0(phip, phim, out.phi0, sigma1, sigma2, m);
  const Grassmann B1 = fused_B1(phip, phim, out.phi0, out.psi0, out.psibar0, in.psi1, in.psi2,
                                in.psibar1, in.psibar2, out.g1, out.g2, rs1, rs2, m);
  // The boundary values psi1 - psi2, psibar1 - psibar2 stay independent here;
  // only the auxiliary defect fermions psi0, psibar0 are substituted.  Their
  // sewing values are reported separately as psim, psibarm.
  const Grassmann psim_field = in.psi1 - in.psi2, psibarm_field = in.psibar1 - in.psibar2;
  out.lagrangian_static =
      -i * (psim_field * out.psi0) - i * (psibarm_field * out.psibar0) + B0 + B1;
  return out;
}

}  // namespace sshg
