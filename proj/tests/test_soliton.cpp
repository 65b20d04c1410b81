#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sshg/soliton.hpp"

using namespace sshg;

namespace {

// Right sides of the two closed forms expressing e^{-lambda0} and
// e^{lambda0} through the lightcone combinations of phi-.
struct Lambda0Forms {
  Cplx inv_form, dir_form;
};

Lambda0Forms lambda0_from_conditions(double x, double t, const SolitonParams& p, Cplx z) {
  auto p1 = eval_solution(1, x, t, p, z, z);
  auto p2 = eval_solution(2, x, t, p, z, z);
  Cplx phip = body(p1.phi) + body(p2.phi);
  Cplx dxm = body(*p1.dx_phi) - body(*p2.dx_phi);
  Cplx dtm = body(*p1.dt_phi) - body(*p2.dt_phi);
  Cplx phim = body(p1.phi) - body(p2.phi);
  double w1 = p.omega1(), w2 = p.omega2();
  Cplx inv = -(w2 * w2 * std::exp(-phip) * (dxm - dtm) + w1 * w1 * (dxm + dtm)) /
             (4.0 * p.m * p.m * std::sinh(phip));
  Cplx dir = -(w2 * w2 * std::exp(phip) * (dxm - dtm) + w1 * w1 * (dxm + dtm)) /
             (2.0 * w1 * w1 * w2 * w2 * std::sinh(phip) * (std::cosh(phim) - 1.0));
  return {inv, dir};
}

}  // namespace

TEST_CASE("delay roots: special values and unimodularity") {
  // theta + eta2 - eta1 = 0 gives ((1+i)/(1-i))^2 = -1.
  auto [z1, z2] = delay_z(0.0, 0.0, 0.0);
  CHECK(std::abs(z1 - Cplx(-1.0, 0.0)) < 1e-14);
  CHECK(std::abs(z2 - Cplx(-1.0, 0.0)) < 1e-14);

  auto [zl, _] = delay_z(25.0, 0.0, 0.0);
  CHECK(std::abs(zl - 1.0) < 1e-10);

  for (double th : {0.3, 1.0, 2.7})
    for (double e1 : {-0.5, 0.4})
      for (double e2 : {0.0, 0.9}) {
        auto [a, b] = delay_z(th, e1, e2);
        CHECK(std::abs(std::abs(a) - 1.0) < 1e-12);
        CHECK(std::abs(a * b - 1.0) < 1e-12);
        CHECK(std::abs(a - delay_z_tanh_form(th, e1, e2)) < 1e-12);
      }
}

TEST_CASE("soliton fields: grading and the nilpotent bilinear") {
  SolitonParams p;
  p.theta = 0.9;
  auto [z1, z2] = delay_z(p.theta, p.eta1, p.eta2);
  auto q = eval_solution(1, 0.4, -0.2, p, z1, z1);
  CHECK(is_even(q.phi));
  CHECK(parity(q.psi) == Parity::Odd);
  CHECK(parity(q.psibar) == Parity::Odd);
  CHECK(max_abs(q.psibar * q.psi) == 0.0);
  CHECK(approx_equal(q.psi, std::exp(p.theta) * q.psibar, 1e-14));
  auto q2 = eval_solution(2, 0.4, -0.2, p, z1, z1);
  CHECK(approx_equal(q2.psi, -std::exp(p.theta) * q2.psibar, 1e-14));
}

TEST_CASE("analytic e^{lambda0} agrees with both lightcone inversions") {
  SolitonParams p;
  p.theta = 0.7;
  p.eta1 = 0.2;
  p.eta2 = -0.3;
  p.R1 = Cplx(0.0, 0.8);
  auto [z1, z2] = delay_z(p.theta, p.eta1, p.eta2);
  for (double t : {-1.0, -0.3, 0.2, 0.9}) {
    Cplx el = exp_lambda0_analytic(0.0, t, p, z1).v;
    auto forms = lambda0_from_conditions(0.0, t, p, z1);
    CHECK(std::abs(1.0 / el - forms.inv_form) <= 1e-10 * std::abs(forms.inv_form));
    CHECK(std::abs(el - forms.dir_form) <= 1e-10 * std::abs(el));
    CHECK(std::abs(forms.inv_form * forms.dir_form - 1.0) <= 1e-10);
  }
}

TEST_CASE("wrong delay breaks the lambda0 inversion consistency") {
  SolitonParams p;
  p.theta = 0.7;
  Cplx zbad(0.4, 0.6);
  auto forms = lambda0_from_conditions(0.0, 0.3, p, zbad);
  CHECK(std::abs(forms.inv_form * forms.dir_form - 1.0) > 1e-3);
}

TEST_CASE("early-time limit of e^{lambda0}") {
  SolitonParams p;
  p.theta = 0.8;
  p.eta1 = 0.1;
  p.eta2 = 0.4;
  auto [z1, z2] = delay_z(p.theta, p.eta1, p.eta2);
  Cplx el = exp_lambda0_analytic(0.0, -30.0, p, z1).v;
  Cplx want = Cplx(0.0, p.m) / (p.omega1() * p.omega2());
  CHECK(std::abs(el - want) < 1e-10);
}

TEST_CASE("dual-number time derivative of e^{lambda0} matches finite differences") {
  SolitonParams p;
  p.theta = 0.6;
  auto [z1, z2] = delay_z(p.theta, p.eta1, p.eta2);
  double t = 0.37, h = 1e-6;
  auto el = exp_lambda0_analytic(0.0, t, p, z1);
  Cplx fd = (exp_lambda0_analytic(0.0, t + h, p, z1).v - exp_lambda0_analytic(0.0, t - h, p, z1).v) / (2.0 * h);
  CHECK(std::abs(el.d - fd) < 1e-6);
  double h2 = 1e-4;
  Cplx fd2 = (exp_lambda0_analytic(0.0, t + h2, p, z1).v - 2.0 * el.v +
              exp_lambda0_analytic(0.0, t - h2, p, z1).v) / (h2 * h2);
  CHECK(std::abs(el.dd - fd2) < 1e-5);
}

TEST_CASE("auxiliary fermions: grading and derivative cross-check") {
  SolitonParams p;
  p.theta = 0.9;
  p.eta1 = -0.2;
  p.eta2 = 0.3;
  auto [z1, z2] = delay_z(p.theta, p.eta1, p.eta2);
  auto aux = aux_analytic(0.0, 0.25, p, z1, z1);
  CHECK(parity(aux.f1) == Parity::Odd);
  CHECK(parity(aux.f1t) == Parity::Odd);
  CHECK(is_even(aux.lambda0));

  double h = 1e-6;
  auto ap = aux_analytic(0.0, 0.25 + h, p, z1, z1);
  auto am = aux_analytic(0.0, 0.25 - h, p, z1, z1);
  CHECK(max_abs(aux.dt_f1 - (1.0 / (2.0 * h)) * (ap.f1 - am.f1)) < 1e-6);
  CHECK(max_abs(aux.dt_f1t - (1.0 / (2.0 * h)) * (ap.f1t - am.f1t)) < 1e-6);
  CHECK(max_abs(aux.dt_lambda0 - (1.0 / (2.0 * h)) * (ap.lambda0 - am.lambda0)) < 1e-6);
}

TEST_CASE("f1 / f1t ratio: closed form with the negative root of sqrt(z)") {
  SolitonParams p;
  p.theta = 1.2;
  p.eta1 = 0.15;
  p.eta2 = -0.4;
  p.R1 = Cplx(0.0, 0.5);
  auto [z1, z2] = delay_z(p.theta, p.eta1, p.eta2);
  for (double t : {-0.8, 0.0, 0.6}) {
    auto aux = aux_analytic(0.0, t, p, z1, z1);
    Cplx ratio = aux_ratio_reference(0.0, t, p, z1);
    unsigned em = 1u << p.eps_bit;
    CHECK(std::abs(aux.f1[em] + ratio * aux.f1t[em]) <= 1e-9 * std::abs(aux.f1[em]));
  }
}

TEST_CASE("R1 -> 0 limit sends f1 to -f1t") {
  SolitonParams p;
  p.theta = 0.8;
  p.R1 = Cplx(0.0, 1e-9);
  auto [z1, z2] = delay_z(p.theta, p.eta1, p.eta2);
  auto aux = aux_analytic(0.0, 0.1, p, z1, z1);
  unsigned em = 1u << p.eps_bit;
  CHECK(std::abs(aux.f1[em] + aux.f1t[em]) <= 1e-6 * std::abs(aux.f1t[em]));
}
