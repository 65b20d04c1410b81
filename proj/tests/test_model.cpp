#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sshg/model.hpp"
#include "sshg/soliton.hpp"

using namespace sshg;

namespace {

std::mt19937 rng(9182);

Cplx rand_cplx() {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng)};
}

Grassmann rand_graded(int n, int par) {
  Grassmann x(n);
  for (unsigned m = 0; m < x.size(); ++m)
    if ((std::popcount(m) & 1) == par) x[m] = rand_cplx();
  return x;
}

BulkPoint rand_point(int n) {
  BulkPoint p{rand_graded(n, 0), rand_graded(n, 1), rand_graded(n, 1)};
  p.dx_phi = rand_graded(n, 0);
  p.dt_phi = rand_graded(n, 0);
  p.dxx_phi = rand_graded(n, 0);
  p.dtt_phi = rand_graded(n, 0);
  p.dx_psi = rand_graded(n, 1);
  p.dt_psi = rand_graded(n, 1);
  p.dx_psibar = rand_graded(n, 1);
  p.dt_psibar = rand_graded(n, 1);
  return p;
}

}  // namespace

TEST_CASE("zero point: residuals, lagrangian, densities all vanish") {
  ModelParams prm{1.4};
  auto p = BulkPoint::zero(2);
  auto r = bulk_eom_residual(p, prm);
  CHECK(max_abs(r.boson) == 0.0);
  CHECK(max_abs(r.fermion) == 0.0);
  CHECK(max_abs(r.fermion_bar) == 0.0);
  CHECK(max_abs(bulk_lagrangian_density(p, prm)) == 0.0);
  auto c = charge_densities(p, prm);
  CHECK(max_abs(c.energy) == 0.0);
  CHECK(max_abs(c.momentum) == 0.0);
  CHECK(max_abs(c.supercharge) == 0.0);
  CHECK(max_abs(c.supercharge_bar) == 0.0);
}

TEST_CASE("missing derivative slots throw") {
  ModelParams prm{1.0};
  BulkPoint p{Grassmann(2), Grassmann(2), Grassmann(2)};
  CHECK_THROWS_AS(bulk_eom_residual(p, prm), std::invalid_argument);
  CHECK_THROWS_AS(charge_densities(p, prm), std::invalid_argument);
}

TEST_CASE("constant pure boson: lagrangian is the potential") {
  ModelParams prm{0.9};
  auto p = BulkPoint::zero(2);
  Cplx c0(0.4, 0.3);
  p.phi = Grassmann::scalar(2, c0);
  auto L = bulk_lagrangian_density(p, prm);
  Cplx want = prm.m * prm.m * (std::cosh(2.0 * c0) - 1.0);
  CHECK(std::abs(body(L) - want) < 1e-14);
  CHECK(max_abs(soul(L)) == 0.0);
}

TEST_CASE("fermion bilinear sector of the lagrangian") {
  ModelParams prm{1.2};
  const Cplx i(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    auto p = rand_point(4);
    auto full = bulk_lagrangian_density(p, prm);
    auto nof = p;
    nof.psi = nof.psibar = Grassmann(4);
    nof.dx_psi = nof.dt_psi = nof.dx_psibar = nof.dt_psibar = Grassmann(4);
    auto bosonic = bulk_lagrangian_density(nof, prm);
    // The psibar-psi potential sector (kinetic fermion terms stripped).
    auto pot = full - bosonic -
               (i * (p.psi * (*p.dx_psi + *p.dt_psi)) - i * (p.psibar * (*p.dx_psibar - *p.dt_psibar)));
    auto want = Cplx(0.0, -4.0 * prm.m) * (p.psibar * p.psi * cosh_of(p.phi));
    CHECK(approx_equal(pot, want, 1e-12));
  }
}

TEST_CASE("lab and lightcone residual forms agree on random jets") {
  ModelParams prm{1.1};
  for (int rep = 0; rep < 25; ++rep) {
    auto p = rand_point(4);
    auto lab = bulk_eom_residual(p, prm);
    auto dpdm_phi = 0.25 * (*p.dxx_phi - *p.dtt_phi);
    auto dm_psibar = dminus(p.dx_psibar, p.dt_psibar);
    auto dp_psi = dplus(p.dx_psi, p.dt_psi);
    auto lc = bulk_eom_residual_lightcone(p.phi, p.psi, p.psibar, dpdm_phi, dm_psibar, dp_psi, prm);
    CHECK(approx_equal(lab.boson, 4.0 * lc.boson, 1e-12));
    CHECK(approx_equal(lab.fermion_bar, 2.0 * lc.fermion_bar, 1e-12));
    CHECK(approx_equal(lab.fermion, 2.0 * lc.fermion, 1e-12));
  }
}

TEST_CASE("analytic soliton satisfies the field equations") {
  SolitonParams sp;
  sp.theta = 0.8;
  sp.m = 1.0;
  sp.R1 = Cplx(0.0, 1.0);
  sp.s1 = Cplx(0.6, 0.2);
  auto [z1, z2] = delay_z(sp.theta, sp.eta1, sp.eta2);
  ModelParams prm{sp.m};
  for (int side : {1, 2})
    for (double x = -2.0; x <= 2.0; x += 0.5)
      for (double t = -1.5; t <= 1.5; t += 0.5) {
        auto p = eval_solution(side, x, t, sp, z1, z1);
        auto r = bulk_eom_residual(p, prm);
        CHECK(max_abs(r.boson) <= 1e-10);
        CHECK(max_abs(r.fermion) <= 1e-10);
        CHECK(max_abs(r.fermion_bar) <= 1e-10);
      }
}

TEST_CASE("side-2 boson solves the equation for arbitrary delay") {
  SolitonParams sp;
  sp.theta = 1.1;
  ModelParams prm{sp.m};
  for (Cplx z : {Cplx(0.3, 0.7), Cplx(-1.2, 0.1), Cplx(2.0, 0.0)}) {
    auto p = eval_solution(2, 0.7, -0.4, sp, z, z);
    CHECK(max_abs(bulk_eom_residual(p, prm).boson) <= 1e-10);
  }
}

TEST_CASE("static kink slice has zero momentum density") {
  // theta = 0 gives b = 0: a time-independent profile with no fermion drift.
  SolitonParams sp;
  sp.theta = 0.0;
  sp.s1 = Cplx(0.0, 0.0);
  ModelParams prm{sp.m};
  auto p = eval_solution(1, 0.9, 0.3, sp, Cplx(1.0), Cplx(1.0));
  CHECK(max_abs(*p.dt_phi) <= 1e-14);
  CHECK(max_abs(charge_densities(p, prm).momentum) <= 1e-14);
}

TEST_CASE("supercharge density term-by-term on a soliton point") {
  SolitonParams sp;
  sp.theta = 0.6;
  ModelParams prm{sp.m};
  auto [z1, z2] = delay_z(sp.theta, sp.eta1, sp.eta2);
  auto p = eval_solution(1, -0.3, 0.5, sp, z1, z1);
  auto c = charge_densities(p, prm);
  auto q = p.psi * (*p.dt_phi - *p.dx_phi) + 2.0 * prm.m * (p.psibar * sinh_of(p.phi));
  auto qb = p.psibar * (*p.dt_phi + *p.dx_phi) - 2.0 * prm.m * (p.psi * sinh_of(p.phi));
  CHECK(approx_equal(c.supercharge, q, 1e-14));
  CHECK(approx_equal(c.supercharge_bar, qb, 1e-14));
}

TEST_CASE("W vanishes when either fermion vanishes") {
  for (int rep = 0; rep < 10; ++rep) {
    auto phi = rand_graded(4, 0);
    auto psi = rand_graded(4, 1);
    CHECK(max_abs(bulk_potential_W(phi, psi, Grassmann(4), 1.3)) == 0.0);
    CHECK(max_abs(bulk_potential_W(phi, Grassmann(4), psi, 1.3)) == 0.0);
  }
}
