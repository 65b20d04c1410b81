#pragma once

#include <optional>
#include <stdexcept>

#include "sshg/grassmann.hpp"

namespace sshg {

struct ModelParams {
  double m = 1.0;
};

/// Field values and lab-frame derivatives at one event. Derivative slots
/// are optional; operations throw when a needed slot is absent.
struct BulkPoint {
  Grassmann phi, psi, psibar;
  std::optional<Grassmann> dx_phi, dt_phi, dxx_phi, dtt_phi;
  std::optional<Grassmann> dx_psi, dt_psi, dx_psibar, dt_psibar;

  static BulkPoint zero(int n) {
    BulkPoint p{Grassmann(n), Grassmann(n), Grassmann(n)};
    p.dx_phi = p.dt_phi = p.dxx_phi = p.dtt_phi = Grassmann(n);
    p.dx_psi = p.dt_psi = p.dx_psibar = p.dt_psibar = Grassmann(n);
    return p;
  }
  const Grassmann& need(const std::optional<Grassmann>& slot, const char* what) const {
    if (!slot) throw std::invalid_argument(std::string("bulk point: missing ") + what);
    return *slot;
  }
};

// Lightcone combinations, x_center = x +- t so d_center = (dx +- dt)/2.
inline Grassmann dplus(const std::optional<Grassmann>& dx, const std::optional<Grassmann>& dt) {
  if (!dx || !dt) throw std::invalid_argument("bulk point: missing derivative");
  return 0.5 * (*dx + *dt);
}
inline Grassmann dminus(const std::optional<Grassmann>& dx, const std::optional<Grassmann>& dt) {
  if (!dx || !dt) throw std::invalid_argument("bulk point: missing derivative");
  return 0.5 * (*dx - *dt);
}

struct EomResidual {
  Grassmann boson, fermion_bar, fermion;
};

/// Lab-frame field equations:
///   d_x^2 phi - d_t^2 phi = 2 m^2 sinh(2 phi) - 4 i m psibar psi sinh(phi)
///   (d_x - d_t) psibar = -2 m psi cosh(phi)
///   (d_x + d_t) psi    = -2 m psibar cosh(phi)
inline EomResidual bulk_eom_residual(const BulkPoint& p, const ModelParams& prm) {
  const Cplx i(0.0, 1.0);
  const double m = prm.m;
  Grassmann rb = p.need(p.dxx_phi, "dxx phi") - p.need(p.dtt_phi, "dtt phi") -
                 2.0 * m * m * sinh_of(2.0 * p.phi) + (4.0 * i * m) * (p.psibar * p.psi * sinh_of(p.phi));
  Grassmann rfb = p.need(p.dx_psibar, "dx psibar") - p.need(p.dt_psibar, "dt psibar") +
                  2.0 * m * (p.psi * cosh_of(p.phi));
  Grassmann rf = p.need(p.dx_psi, "dx psi") + p.need(p.dt_psi, "dt psi") +
                 2.0 * m * (p.psibar * cosh_of(p.phi));
  return {rb, rfb, rf};
}

/// Same equations in lightcone form (divided through by the frame factors):
///   d+d- phi = m^2/2 sinh(2 phi) - i m psibar psi sinh(phi)
///   d- psibar = -m psi cosh(phi)
///   d+ psi    = -m psibar cosh(phi)
inline EomResidual bulk_eom_residual_lightcone(const Grassmann& phi, const Grassmann& psi,
                                               const Grassmann& psibar, const Grassmann& dpdm_phi,
                                               const Grassmann& dm_psibar, const Grassmann& dp_psi,
                                               const ModelParams& prm) {
  const Cplx i(0.0, 1.0);
  const double m = prm.m;
  Grassmann rb = dpdm_phi - 0.5 * m * m * sinh_of(2.0 * phi) + (i * m) * (psibar * psi * sinh_of(phi));
  Grassmann rfb = dm_psibar + m * (psi * cosh_of(phi));
  Grassmann rf = dp_psi + m * (psibar * cosh_of(phi));
  return {rb, rfb, rf};
}

inline Grassmann bulk_potential_V(const Grassmann& phi, double m) {
  int n = phi.generators();
  return m * m * (cosh_of(2.0 * phi) - Grassmann::scalar(n, 1.0));
}

inline Grassmann bulk_potential_W(const Grassmann& phi, const Grassmann& psi, const Grassmann& psibar, double m) {
  return Cplx(0.0, -4.0 * m) * (psibar * psi * cosh_of(phi));
}

inline Grassmann bulk_lagrangian_density(const BulkPoint& p, const ModelParams& prm) {
  const Cplx i(0.0, 1.0);
  const Grassmann& dxphi = p.need(p.dx_phi, "dx phi");
  const Grassmann& dtphi = p.need(p.dt_phi, "dt phi");
  return 0.5 * (dxphi * dxphi) - 0.5 * (dtphi * dtphi) +
         i * (p.psi * (p.need(p.dx_psi, "dx psi") + p.need(p.dt_psi, "dt psi"))) -
         i * (p.psibar * (p.need(p.dx_psibar, "dx psibar") - p.need(p.dt_psibar, "dt psibar"))) +
         bulk_potential_V(p.phi, prm.m) + bulk_potential_W(p.phi, p.psi, p.psibar, prm.m);
}

struct ChargeDensities {
  Grassmann energy, momentum, supercharge, supercharge_bar;
};

inline ChargeDensities charge_densities(const BulkPoint& p, const ModelParams& prm) {
  const Cplx i(0.0, 1.0);
  const double m = prm.m;
  const Grassmann& dxphi = p.need(p.dx_phi, "dx phi");
  const Grassmann& dtphi = p.need(p.dt_phi, "dt phi");
  Grassmann energy = 0.5 * (dxphi * dxphi) + 0.5 * (dtphi * dtphi) -
                     i * (p.psibar * p.need(p.dx_psibar, "dx psibar")) +
                     i * (p.psi * p.need(p.dx_psi, "dx psi")) +
                     bulk_potential_V(p.phi, m) + bulk_potential_W(p.phi, p.psi, p.psibar, m);
  Grassmann momentum = dtphi * dxphi - i * (p.psibar * p.need(p.dx_psibar, "dx psibar")) -
                       i * (p.psi * p.need(p.dx_psi, "dx psi"));
  Grassmann q = p.psi * (dtphi - dxphi) + 2.0 * m * (p.psibar * sinh_of(p.phi));
  Grassmann qbar = p.psibar * (dtphi + dxphi) - 2.0 * m * (p.psi * sinh_of(p.phi));
  return {energy, momentum, q, qbar};
}

}  // namespace sshg
