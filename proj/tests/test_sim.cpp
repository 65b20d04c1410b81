#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "sshg/sim.hpp"

using namespace sshg;

namespace {

SolitonParams run_soliton() {
  SolitonParams sp;
  sp.theta = 0.7;
  sp.eta1 = 0.3;
  sp.eta2 = -0.2;
  sp.m = 1.0;
  return sp;
}

SimParams run_params(double dx, double L = 15.0) {
  SimParams pm;
  pm.L = L;
  pm.dx = dx;
  pm.m = 1.0;
  pm.w1 = std::exp(0.3);
  pm.w2 = std::exp(-0.2);
  return pm;
}

// Spatial flux of each conserved density: d(rho)/dt = d(F)/dx in the bulk.
struct Fluxes {
  Grassmann E, P, Q, Qbar;
};

Fluxes fluxes_at(const BulkPoint& p, double m) {
  const Cplx i(0.0, 1.0);
  const Grassmann &phit = *p.dt_phi, &phix = *p.dx_phi;
  const Grassmann &psix = *p.dx_psi, &psibx = *p.dx_psibar;
  Fluxes f;
  f.E = phit * phix - i * (p.psibar * psibx) - i * (p.psi * psix);
  f.P = 0.5 * (phit * phit) + 0.5 * (phix * phix) - bulk_potential_V(p.phi, m) -
        i * (p.psibar * psibx) + i * (p.psi * psix);
  f.Q = Cplx(-1.0) * (p.psi * (phit - phix)) + (2.0 * m) * (p.psibar * sinh_of(p.phi));
  f.Qbar = p.psibar * (phit + phix) + (2.0 * m) * (p.psi * sinh_of(p.phi));
  return f;
}

DefectCharges charges_at(double t, const SolitonParams& sp, Cplx z, const DefectParams& prm) {
  DefectState ds{eval_solution(1, 0.0, t, sp, z, z), eval_solution(2, 0.0, t, sp, z, z),
                 Grassmann(sp.gen_count), Grassmann(sp.gen_count), Grassmann(sp.gen_count)};
  const AuxPoint a = aux_analytic(0.0, t, sp, z, z);
  ds.lambda0 = a.lambda0;
  ds.f1 = a.f1;
  ds.f1t = a.f1t;
  return modified_charges(ds, prm);
}

}  // namespace

TEST_CASE("defect charges balance the bulk flux difference across the junction") {
  // On the analytic solution, d/dt of each defect charge must equal the
  // difference of the corresponding bulk flux evaluated on the two sides of
  // x = 0; this is what makes bulk integral + defect term conserved.
  const SolitonParams sp = run_soliton();
  const auto [z1, z2] = delay_z(sp.theta, sp.eta1, sp.eta2);
  const DefectParams prm = DefectParams::from_omega(sp.omega1(), sp.omega2(), sp.m);
  const double eps = 1e-5;
  for (double t : {-3.0, -0.5, 0.4, 2.0}) {
    const DefectCharges cp = charges_at(t + eps, sp, z1, prm);
    const DefectCharges cm = charges_at(t - eps, sp, z1, prm);
    const Fluxes f1 = fluxes_at(eval_solution(1, 0.0, t, sp, z1, z1), sp.m);
    const Fluxes f2 = fluxes_at(eval_solution(2, 0.0, t, sp, z1, z1), sp.m);
    auto balance = [&](const Grassmann& qp, const Grassmann& qm, const Grassmann& F1,
                       const Grassmann& F2) {
      return max_abs((0.5 / eps) * (qp - qm) - (F2 - F1));
    };
    CHECK(balance(cp.E_D, cm.E_D, f1.E, f2.E) < 1e-7);
    CHECK(balance(cp.P_D, cm.P_D, f1.P, f2.P) < 1e-7);
    CHECK(balance(cp.Q_D, cm.Q_D, f1.Q, f2.Q) < 1e-7);
    CHECK(balance(cp.Qbar_D, cm.Qbar_D, f1.Qbar, f2.Qbar) < 1e-7);
    // Negative control: the opposite flux orientation does not balance.
    CHECK(balance(cp.E_D, cm.E_D, f2.E, f1.E) > 1e-2);
  }
}

TEST_CASE("defect vacuum is an exact lattice fixed point") {
  const SimParams pm = run_params(0.05, 5.0);
  LatticeState st = init_vacuum(pm, 0.0);
  const LatticeState ref = st;

  const JunctionRates r = junction_rates(st, pm);
  for (const Grassmann* g : {&r.dphi1, &r.dphi2, &r.dlambda0, &r.df1, &r.df1t, &r.dv1j, &r.du2j})
    CHECK(max_abs(*g) < 1e-13);

  for (int k = 0; k < 25; ++k) step(st, pm);
  double worst = 0.0;
  for (size_t j = 0; j < st.s1.size(); ++j) {
    worst = std::max(worst, max_abs(st.s1.phi[j] - ref.s1.phi[j]));
    worst = std::max(worst, max_abs(st.s2.phi[j] - ref.s2.phi[j]));
    worst = std::max(worst, max_abs(st.s1.phidot[j] - ref.s1.phidot[j]));
  }
  worst = std::max(worst, max_abs(st.lambda0 - ref.lambda0));
  worst = std::max(worst, max_abs(st.f1 - ref.f1));
  CHECK(worst < 1e-13);
}

TEST_CASE("all-zero field configuration: bulk charges vanish, defect energy is m^2/w1^2 + m^2/w2^2") {
  const SimParams pm = run_params(0.05, 5.0);
  LatticeState st = init_vacuum(pm, 0.0);
  for (auto& g : st.s2.phi) g = Grassmann(st.n);
  st.lambda0 = Grassmann(st.n);
  const ChargeRecord c = total_charges(st, pm);
  CHECK(max_abs(c.E) < 1e-12);
  CHECK(max_abs(c.P) < 1e-12);
  CHECK(max_abs(c.Q) < 1e-12);
  CHECK(max_abs(c.Qbar) < 1e-12);
  const Cplx expected = pm.m * pm.m / (pm.w1 * pm.w1) + pm.m * pm.m / (pm.w2 * pm.w2);
  CHECK(std::abs(c.E_D[0] - expected) < 1e-12);
}

TEST_CASE("junction closure tracks the analytic defect data when driven by exact outgoing waves") {
  // Integrate only the junction variables, with the outgoing characteristics
  // and outgoing fermions supplied by the analytic solution; the sewing
  // closure must then reproduce the analytic phi, lambda0, f1, f1t at x = 0.
  const SolitonParams sp = run_soliton();
  const auto [z1, z2] = delay_z(sp.theta, sp.eta1, sp.eta2);
  const DefectParams prm = DefectParams::from_omega(sp.omega1(), sp.omega2(), sp.m);
  const int n = sp.gen_count;

  struct Y {
    Grassmann phi1, phi2, l0, f1, f1t;
  };
  auto rates = [&](const Y& y, double t) {
    const BulkPoint p1 = eval_solution(1, 0.0, t, sp, z1, z1);
    const BulkPoint p2 = eval_solution(2, 0.0, t, sp, z1, z1);
    const Grassmann v1 = *p1.dt_phi - *p1.dx_phi;
    const Grassmann u2 = *p2.dt_phi + *p2.dx_phi;
    const auto s = sim_detail::sew(y.phi1, y.phi2, y.l0, y.f1, y.f1t, p1.psi, p2.psibar, prm);
    const Grassmann u1 = u2 - s.g1;
    const Grassmann v2 = v1 - s.g2;
    return Y{0.5 * (u1 + v1), 0.5 * (u2 + v2), 0.5 * (v1 + v2 - s.g0), s.rate_f1, s.rate_f1t};
  };

  const double t0 = -3.0, t1 = -1.0, dt = 1e-3;
  const BulkPoint q1 = eval_solution(1, 0.0, t0, sp, z1, z1);
  const BulkPoint q2 = eval_solution(2, 0.0, t0, sp, z1, z1);
  const AuxPoint a0 = aux_analytic(0.0, t0, sp, z1, z1);
  Y y{q1.phi, q2.phi, a0.lambda0, a0.f1, a0.f1t};
  auto axpy = [n](const Y& y0, double c, const Y& k) {
    return Y{y0.phi1 + c * k.phi1, y0.phi2 + c * k.phi2, y0.l0 + c * k.l0, y0.f1 + c * k.f1,
             y0.f1t + c * k.f1t};
  };
  const int steps = int(std::lround((t1 - t0) / dt));
  for (int s = 0; s < steps; ++s) {
    const double t = t0 + s * dt;
    const Y k1 = rates(y, t);
    const Y k2 = rates(axpy(y, 0.5 * dt, k1), t + 0.5 * dt);
    const Y k3 = rates(axpy(y, 0.5 * dt, k2), t + 0.5 * dt);
    const Y k4 = rates(axpy(y, dt, k3), t + dt);
    y = axpy(axpy(axpy(axpy(y, dt / 6.0, k1), dt / 3.0, k2), dt / 3.0, k3), dt / 6.0, k4);
  }
  const BulkPoint r1 = eval_solution(1, 0.0, t1, sp, z1, z1);
  const BulkPoint r2 = eval_solution(2, 0.0, t1, sp, z1, z1);
  const AuxPoint a1 = aux_analytic(0.0, t1, sp, z1, z1);
  CHECK(max_abs(y.phi1 - r1.phi) < 1e-6);
  CHECK(max_abs(y.phi2 - r2.phi) < 1e-6);
  CHECK(max_abs(y.l0 - a1.lambda0) < 1e-6);
  CHECK(max_abs(y.f1 - a1.f1) < 1e-6);
  CHECK(max_abs(y.f1t - a1.f1t) < 1e-6);
}

TEST_CASE("soliton transmission: fields converge at second order to the analytic solution") {
  const SolitonParams sp = run_soliton();
  const auto [z1, z2] = delay_z(sp.theta, sp.eta1, sp.eta2);
  double err_phi[2], err_l0[2], err_ferm[2];
  int lvl = 0;
  for (double dx : {0.08, 0.04}) {
    const SimParams pm = run_params(dx);
    LatticeState st = init_soliton(pm, sp, z1, -3.0);
    const int steps = int(std::lround(2.0 / st.dt));
    for (int k = 0; k < steps; ++k) step(st, pm);
    REQUIRE(grading_ok(st));
    double wp = 0.0, wf = 0.0;
    for (size_t j = 0; j < st.s2.size(); ++j) {
      const BulkPoint p = eval_solution(2, j * st.dx, st.t, sp, z1, z1);
      wp = std::max(wp, std::abs(std::exp(st.s2.phi[j][0]) - std::exp(p.phi[0])));
      wf = std::max(wf, max_abs(st.s2.psi[j] - p.psi));
    }
    for (size_t j = 0; j < st.s1.size(); ++j) {
      const BulkPoint p = eval_solution(1, -pm.L + j * st.dx, st.t, sp, z1, z1);
      wp = std::max(wp, std::abs(std::exp(st.s1.phi[j][0]) - std::exp(p.phi[0])));
      wf = std::max(wf, max_abs(st.s1.psibar[j] - p.psibar));
    }
    const AuxPoint a = aux_analytic(0.0, st.t, sp, z1, z1);
    err_phi[lvl] = wp;
    err_l0[lvl] = std::max(max_abs(st.lambda0 - a.lambda0),
                           std::max(max_abs(st.f1 - a.f1), max_abs(st.f1t - a.f1t)));
    err_ferm[lvl] = wf;
    ++lvl;
  }
  CHECK(err_phi[1] < 2.5e-3);
  CHECK(err_l0[1] < 1e-2);
  CHECK(err_phi[0] / err_phi[1] > 3.0);
  CHECK(err_l0[0] / err_l0[1] > 3.0);
  CHECK(err_ferm[0] / err_ferm[1] > 3.0);
}

TEST_CASE("soliton crossing conserves the modified charges; bulk energy alone does not") {
  const SolitonParams sp = run_soliton();
  const auto [z1, z2] = delay_z(sp.theta, sp.eta1, sp.eta2);
  double drift[2];
  int lvl = 0;
  for (double dx : {0.08, 0.04}) {
    const SimParams pm = run_params(dx);
    LatticeState st = init_soliton(pm, sp, z1, -2.0);
    const ChargeRecord c0 = total_charges(st, pm);
    const double scale = std::abs(c0.total_E[0]);
    const int steps = int(std::lround(4.0 / st.dt));
    double dE = 0.0, dP = 0.0, dQ = 0.0, dQb = 0.0, dE_alone = 0.0;
    for (int k = 1; k <= steps; ++k) {
      step(st, pm);
      if (k % 10 == 0 || k == steps) {
        const ChargeRecord c = total_charges(st, pm);
        dE = std::max(dE, std::abs(c.total_E[0] - c0.total_E[0]));
        dP = std::max(dP, std::abs(c.total_P[0] - c0.total_P[0]));
        dQ = std::max(dQ, max_abs(c.total_Q - c0.total_Q));
        dQb = std::max(dQb, max_abs(c.total_Qbar - c0.total_Qbar));
        dE_alone = std::max(dE_alone, std::abs(c.E[0] - c0.E[0]));
      }
    }
    drift[lvl++] = dE / scale;
    CHECK(dP / scale < 50.0 * dE / scale + 1e-3);
    CHECK(dQ < 2e-2);
    CHECK(dQb < 2e-2);
    // Negative control: energy without the defect term is visibly exchanged.
    CHECK(dE_alone / scale > 20.0 * dE / scale);
    CHECK(dE_alone / scale > 1e-2);
  }
  CHECK(drift[1] < 5e-4);
  CHECK(drift[0] / drift[1] > 2.5);
}

TEST_CASE("boson sector is unaffected by single-generator fermions") {
  // With one Grassmann generator every fermion bilinear vanishes, so the
  // phi body must evolve exactly as with fermions switched off.
  const SolitonParams sp = run_soliton();
  const auto [z1, z2] = delay_z(sp.theta, sp.eta1, sp.eta2);
  const SimParams pm = run_params(0.1, 5.0);
  LatticeState a = init_soliton(pm, sp, z1, -1.0);
  LatticeState b = a;
  for (auto* ln : {&b.s1, &b.s2})
    for (size_t j = 0; j < ln->size(); ++j) ln->psi[j] = ln->psibar[j] = Grassmann(b.n);
  b.f1 = b.f1t = Grassmann(b.n);
  for (int k = 0; k < 30; ++k) {
    step(a, pm);
    step(b, pm);
  }
  double worst = 0.0;
  for (size_t j = 0; j < a.s1.size(); ++j) {
    worst = std::max(worst, std::abs(a.s1.phi[j][0] - b.s1.phi[j][0]));
    worst = std::max(worst, std::abs(a.s2.phi[j][0] - b.s2.phi[j][0]));
  }
  worst = std::max(worst, std::abs(a.lambda0[0] - b.lambda0[0]));
  CHECK(worst < 1e-13);
}

TEST_CASE("delay fit recovers the exact factor from analytic transmitted fields") {
  const SolitonParams sp = run_soliton();
  const auto [z1, z2] = delay_z(sp.theta, sp.eta1, sp.eta2);
  const SimParams pm = run_params(0.02);
  const LatticeState st = init_soliton(pm, sp, z1, 5.0);
  const Cplx zfit = measure_delay(st, sp);
  CHECK(std::abs(zfit - z1) < 1e-10);

  // Poorly conditioned window (soliton far from the fit region) must throw.
  const LatticeState early = init_soliton(pm, sp, z1, -40.0);
  CHECK_THROWS_AS((void)measure_delay(early, sp), std::runtime_error);
}

TEST_CASE("delay measured from evolved fields approaches the analytic factor") {
  const SolitonParams sp = run_soliton();
  const auto [z1, z2] = delay_z(sp.theta, sp.eta1, sp.eta2);
  const SimParams pm = run_params(0.04);
  LatticeState st = init_soliton(pm, sp, z1, -4.0);
  const int steps = int(std::lround(8.0 / st.dt));
  for (int k = 0; k < steps; ++k) step(st, pm);
  const Cplx zfit = measure_delay(st, sp);
  CHECK(std::abs(zfit - z1) / std::abs(z1) < 5e-2);
}

TEST_CASE("free-line reference: interior kernels conserve bulk energy at second order") {
  const SolitonParams sp = run_soliton();
  const auto [z1, z2] = delay_z(sp.theta, sp.eta1, sp.eta2);
  double drift[2];
  int lvl = 0;
  for (double dx : {0.08, 0.04}) {
    FreeLattice fl = init_free_soliton(-12.0, 12.0, dx, 0.5, sp, z1, -2.0);
    const Grassmann e0 = free_energy(fl, sp.m);
    const int steps = int(std::lround(4.0 / fl.dt));
    for (int k = 0; k < steps; ++k) free_step(fl, sp.m);
    drift[lvl++] = max_abs(free_energy(fl, sp.m) - e0) / std::abs(e0[0]);
  }
  CHECK(drift[1] < 2e-4);
  CHECK(drift[0] / drift[1] > 3.0);
}

TEST_CASE("parallel and serial kernels produce identical trajectories") {
  const SolitonParams sp = run_soliton();
  const auto [z1, z2] = delay_z(sp.theta, sp.eta1, sp.eta2);
  SimParams ppar = run_params(0.05, 6.0);
  SimParams pser = ppar;
  ppar.parallel = true;
  pser.parallel = false;
  LatticeState a = init_soliton(ppar, sp, z1, -1.0);
  LatticeState b = init_soliton(pser, sp, z1, -1.0);
  for (int k = 0; k < 40; ++k) {
    step(a, ppar);
    step(b, pser);
  }
  double worst = 0.0;
  for (size_t j = 0; j < a.s1.size(); ++j) {
    worst = std::max(worst, max_abs(a.s1.phi[j] - b.s1.phi[j]));
    worst = std::max(worst, max_abs(a.s2.psi[j] - b.s2.psi[j]));
    worst = std::max(worst, max_abs(a.s1.phidot[j] - b.s1.phidot[j]));
  }
  worst = std::max(worst, max_abs(a.lambda0 - b.lambda0));
  CHECK(worst == 0.0);  // bitwise identical: interior loops are map-only
}

TEST_CASE("checkpoint JSON round-trips the lattice state exactly") {
  const SolitonParams sp = run_soliton();
  const auto [z1, z2] = delay_z(sp.theta, sp.eta1, sp.eta2);
  const SimParams pm = run_params(0.1, 3.0);
  LatticeState st = init_soliton(pm, sp, z1, -0.5);
  for (int k = 0; k < 5; ++k) step(st, pm);
  const nlohmann::json j = checkpoint_json(st);
  const LatticeState rt = checkpoint_from_json(j);
  CHECK(rt.t == st.t);
  CHECK(rt.dx == st.dx);
  double worst = 0.0;
  for (size_t k = 0; k < st.s1.size(); ++k) {
    worst = std::max(worst, max_abs(rt.s1.phi[k] - st.s1.phi[k]));
    worst = std::max(worst, max_abs(rt.s2.psibar[k] - st.s2.psibar[k]));
  }
  worst = std::max(worst, max_abs(rt.f1t - st.f1t));
  CHECK(worst == 0.0);

  // Resuming from the checkpoint reproduces the original trajectory bitwise.
  LatticeState resumed = rt;
  LatticeState direct = st;
  step(resumed, pm);
  step(direct, pm);
  CHECK(max_abs(resumed.lambda0 - direct.lambda0) == 0.0);
}

TEST_CASE("time-series CSV has the advertised layout") {
  const SolitonParams sp = run_soliton();
  const auto [z1, z2] = delay_z(sp.theta, sp.eta1, sp.eta2);
  const SimParams pm = run_params(0.1, 3.0);
  LatticeState st = init_soliton(pm, sp, z1, -0.5);
  std::vector<SeriesRow> rows;
  for (int k = 0; k < 3; ++k) {
    rows.push_back({st.t, total_charges(st, pm), junction_residual(st, pm)});
    step(st, pm);
  }
  const std::string path = (std::filesystem::temp_directory_path() / "sshg_series_test.csv").string();
  write_series_csv(path, rows);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header.find("t,re_E,im_E") == 0);
  CHECK(header.find("max_residual") != std::string::npos);
  int count = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++count;
  CHECK(count == 3);
  std::filesystem::remove(path);
}

TEST_CASE("parameter validation rejects unusable configurations") {
  SimParams pm = run_params(0.05);
  pm.cfl = 1.5;
  CHECK_THROWS_AS(pm.validate(), std::invalid_argument);
  pm = run_params(0.05);
  pm.dx = -1.0;
  CHECK_THROWS_AS(pm.validate(), std::invalid_argument);
}
