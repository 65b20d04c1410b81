#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "sshg/grassmann.hpp"
#include "sshg/serialize.hpp"

using namespace sshg;

namespace {

// Brute-force product oracle: represent each basis monomial as an ordered
// generator list, concatenate, bubble-sort counting transpositions, and
// kill duplicates. Independent of the popcount-prefix sign used in the
// library.
Grassmann slow_multiply(const Grassmann& a, const Grassmann& b) {
  int n = a.generators();
  Grassmann r(n);
  for (unsigned s = 0; s < a.size(); ++s) {
    if (a[s] == Cplx(0.0)) continue;
    for (unsigned t = 0; t < b.size(); ++t) {
      if (b[t] == Cplx(0.0)) continue;
      std::vector<int> gens;
      for (int g = 0; g < n; ++g)
        if (s & (1u << g)) gens.push_back(g);
      for (int g = 0; g < n; ++g)
        if (t & (1u << g)) gens.push_back(g);
      int swaps = 0;
      bool dup = false;
      for (std::size_t i = 0; i + 1 < gens.size() && !dup; ++i)
        for (std::size_t j = 0; j + 1 < gens.size() - i; ++j) {
          if (gens[j] == gens[j + 1]) { dup = true; break; }
          if (gens[j] > gens[j + 1]) { std::swap(gens[j], gens[j + 1]); ++swaps; }
        }
      if (dup || (s & t)) continue;
      Cplx c = a[s] * b[t];
      if (swaps & 1) c = -c;
      r[s | t] += c;
    }
  }
  return r;
}

std::mt19937 rng(20250826);

Cplx rand_cplx() {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng)};
}

Grassmann rand_elem(int n) {
  Grassmann x(n);
  for (unsigned m = 0; m < x.size(); ++m) x[m] = rand_cplx();
  return x;
}

Grassmann rand_homogeneous(int n, int par) {
  Grassmann x(n);
  for (unsigned m = 0; m < x.size(); ++m)
    if ((std::popcount(m) & 1) == par) x[m] = rand_cplx();
  return x;
}

Grassmann theta(int n, int bit) { return Grassmann::generator(n, bit); }

}  // namespace

TEST_CASE("multiply: anticommutation and nilpotency") {
  auto t1 = theta(4, 0), t2 = theta(4, 1);
  CHECK(approx_equal(t1 * t2, Grassmann::basis(4, 0b11, 1.0)));
  CHECK(approx_equal(t2 * t1, Grassmann::basis(4, 0b11, -1.0)));
  CHECK(max_abs(t1 * t1) == 0.0);
}

TEST_CASE("multiply: distributive expansion (1+t1)(1+t2)") {
  auto one = Grassmann::scalar(4, 1.0);
  auto lhs = (one + theta(4, 0)) * (one + theta(4, 1));
  Grassmann want(4);
  want[0b00] = 1.0; want[0b01] = 1.0; want[0b10] = 1.0; want[0b11] = 1.0;
  CHECK(approx_equal(lhs, want));
  CHECK(approx_equal(lhs, slow_multiply(one + theta(4, 0), one + theta(4, 1))));
}

TEST_CASE("multiply matches transposition-count oracle on random pairs") {
  for (int n : {3, 5, 6})
    for (int rep = 0; rep < 50; ++rep) {
      auto a = rand_elem(n), b = rand_elem(n);
      CHECK(approx_equal(a * b, slow_multiply(a, b), 1e-12));
    }
}

TEST_CASE("multiply: mismatched generator counts throw") {
  CHECK_THROWS_AS(Grassmann(3) * Grassmann(4), std::invalid_argument);
}

TEST_CASE("associativity on random triples") {
  for (int n : {4, 6, 8})
    for (int rep = 0; rep < 30; ++rep) {
      auto a = rand_elem(n), b = rand_elem(n), c = rand_elem(n);
      CHECK(approx_equal((a * b) * c, a * (b * c), 1e-12));
    }
}

TEST_CASE("graded commutativity for homogeneous elements") {
  for (int pa = 0; pa < 2; ++pa)
    for (int pb = 0; pb < 2; ++pb)
      for (int rep = 0; rep < 20; ++rep) {
        auto a = rand_homogeneous(6, pa), b = rand_homogeneous(6, pb);
        auto rhs = b * a;
        if (pa == 1 && pb == 1) rhs = -rhs;
        CHECK(approx_equal(a * b, rhs, 1e-12));
      }
}

TEST_CASE("left_derivative: signs and Leibniz") {
  auto t1t2 = Grassmann::basis(4, 0b11, 1.0);
  CHECK(approx_equal(left_derivative(t1t2, 0), theta(4, 1)));
  CHECK(approx_equal(left_derivative(t1t2, 1), -theta(4, 0)));
  CHECK(max_abs(left_derivative(Grassmann::scalar(4, 1.0), 0)) == 0.0);
  CHECK_THROWS_AS(left_derivative(t1t2, 7), std::invalid_argument);

  for (int g = 0; g < 6; ++g)
    for (int pa = 0; pa < 2; ++pa)
      for (int rep = 0; rep < 10; ++rep) {
        auto a = rand_homogeneous(6, pa), b = rand_elem(6);
        auto lhs = left_derivative(a * b, g);
        auto rhs = left_derivative(a, g) * b + (pa ? -1.0 : 1.0) * (a * left_derivative(b, g));
        CHECK(approx_equal(lhs, rhs, 1e-12));
      }
}

TEST_CASE("parity, body, soul") {
  CHECK(parity(Grassmann::basis(4, 0b11, 1.0)) == Parity::Even);
  CHECK(parity(theta(4, 0) + Grassmann::basis(4, 0b11, 1.0)) == Parity::Inhomogeneous);
  CHECK(parity(Grassmann(4)) == Parity::Even);
  auto x = Grassmann::scalar(4, 3.0) + Grassmann::basis(4, 0b11, 2.0);
  CHECK(body(x) == Cplx(3.0));
  CHECK(approx_equal(soul(x), Grassmann::basis(4, 0b11, 2.0)));
}

TEST_CASE("analytic functions of even elements") {
  auto t1t2 = Grassmann::basis(4, 0b11, 1.0);

  SUBCASE("exp of a pure soul") {
    CHECK(approx_equal(exp_of(t1t2), Grassmann::scalar(4, 1.0) + t1t2));
  }
  SUBCASE("sinh(a + b t1t2)") {
    Cplx a(0.3, -0.7), b(1.1, 0.2);
    auto x = Grassmann::scalar(4, a) + b * t1t2;
    auto want = Grassmann::scalar(4, std::sinh(a)) + (b * std::cosh(a)) * t1t2;
    CHECK(approx_equal(sinh_of(x), want));
    auto wantc = Grassmann::scalar(4, std::cosh(a)) + (b * std::sinh(a)) * t1t2;
    CHECK(approx_equal(cosh_of(x), wantc));
  }
  SUBCASE("inverse of 1 + t1t2 + t3t4") {
    auto one = Grassmann::scalar(4, 1.0);
    auto p = Grassmann::basis(4, 0b0011, 1.0), q = Grassmann::basis(4, 0b1100, 1.0);
    auto inv = inverse_of(one + p + q);
    auto want = one - p - q + 2.0 * Grassmann::basis(4, 0b1111, 1.0);
    CHECK(approx_equal(inv, want));
    CHECK(approx_equal(inv * (one + p + q), one, 1e-14));
  }
  SUBCASE("exp(x) exp(-x) = 1 for random even x") {
    for (int rep = 0; rep < 40; ++rep) {
      auto x = rand_homogeneous(6, 0);
      CHECK(approx_equal(exp_of(x) * exp_of(-x), Grassmann::scalar(6, 1.0), 1e-12));
    }
  }
  SUBCASE("sqrt squares back, log inverts exp") {
    for (int rep = 0; rep < 20; ++rep) {
      auto x = rand_homogeneous(6, 0);
      x[0] += 3.0;  // keep the body away from the branch cut
      auto s = sqrt_of(x);
      CHECK(approx_equal(s * s, x, 1e-12));
      CHECK(approx_equal(log_of(exp_of(x)), x, 1e-11));
      CHECK(approx_equal(pow_of(x, Cplx(2.0)), x * x, 1e-11));
    }
  }
  SUBCASE("grading and singularity errors") {
    CHECK_THROWS_AS(exp_of(theta(4, 0)), std::domain_error);
    CHECK_THROWS_AS(inverse_of(t1t2), std::domain_error);
    CHECK_THROWS_AS(sqrt_of(t1t2), std::domain_error);
  }
}

TEST_CASE("odd elements square consistently") {
  for (int rep = 0; rep < 20; ++rep) {
    auto x = rand_homogeneous(6, 1);
    auto sq = x * x;
    for (unsigned m = 0; m < sq.size(); ++m)
      if (std::popcount(m) < 2) CHECK(std::abs(sq[m]) == 0.0);
    auto g = rand_cplx() * theta(6, 2);
    CHECK(max_abs(g * g) == 0.0);
  }
}

TEST_CASE("GeneratorTable: labels and errors") {
  GeneratorTable tab;
  CHECK(tab.add("theta1") == 0);
  CHECK(tab.add("eps") == 1);
  CHECK(tab.bit("eps") == 1);
  CHECK(tab.name(0) == "theta1");
  CHECK_THROWS_AS(tab.add("eps"), std::invalid_argument);
  CHECK_THROWS_AS(tab.bit("nope"), std::invalid_argument);

  auto x = Grassmann::basis(2, 0b11, 1.0);
  CHECK(approx_equal(left_derivative(x, tab, "eps"), -theta(2, 0)));
}

TEST_CASE("dual-scalar instantiation differentiates through the algebra") {
  // d/da of sinh(a + b t1t2) at a: value sector cosh'(...) checks the
  // templated ScalarTraits path.
  Cplx a(0.4, 0.1), b(0.9, -0.3);
  GrassmannD x(4);
  x[0] = Dual(a, 1.0);
  x[0b11] = Dual(b, 0.0);
  auto y = sinh_of(x);
  CHECK(std::abs(y[0].v - std::sinh(a)) < 1e-14);
  CHECK(std::abs(y[0].d - std::cosh(a)) < 1e-14);
  CHECK(std::abs(y[0b11].v - b * std::cosh(a)) < 1e-14);
  CHECK(std::abs(y[0b11].d - b * std::sinh(a)) < 1e-14);
}

TEST_CASE("json round trip") {
  auto x = rand_elem(5);
  auto y = grassmann_from_json(to_json(x));
  CHECK(approx_equal(x, y, 0.0));
}

TEST_CASE("extend_generators embeds faithfully") {
  auto x = rand_elem(4);
  auto y = extend_generators(x, 2);
  CHECK(y.generators() == 6);
  for (unsigned m = 0; m < x.size(); ++m) CHECK(y[m] == x[m]);
}
