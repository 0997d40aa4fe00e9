#include <doctest.h>

#include <cmath>
#include <random>

#include "bomca/jet.hpp"

using namespace bomca;

namespace {

Jet random_jet(std::mt19937& rng, std::size_t order) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Jet j(order);
  for (std::size_t k = 0; k <= order; ++k) j[k] = Complex(u(rng), u(rng));
  return j;
}

double coeff_error(const Jet& a, const Jet& b) {
  double err = 0.0;
  for (std::size_t k = 0; k <= a.order(); ++k) err = std::max(err, std::abs(a[k] - b[k]));
  return err;
}

}  // namespace

TEST_SUITE("jet") {
  TEST_CASE("product is truncated polynomial multiplication") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      Jet a = random_jet(rng, 6), b = random_jet(rng, 6);
      Jet c = a * b;
      for (std::size_t k = 0; k <= 6; ++k) {
        Complex expect = 0.0;
        for (std::size_t j = 0; j <= k; ++j) expect += a[j] * b[k - j];
        CHECK(std::abs(c[k] - expect) < 1e-14);
      }
    }
  }

  TEST_CASE("division inverts multiplication") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      Jet a = random_jet(rng, 8), b = random_jet(rng, 8);
      b[0] += Complex(3.0, 0.0);  // keep b invertible
      CHECK(coeff_error((a / b) * b, a) < 1e-12);
    }
  }

  TEST_CASE("derivatives of the identity series") {
    Jet x = Jet::variable(Complex(0.3, -0.2), 4);
    CHECK(x.derivative(0) == Complex(0.3, -0.2));
    CHECK(x.derivative(1) == Complex(1.0));
    CHECK(x.derivative(2) == Complex(0.0));
    Jet cube = x * x * x;
    CHECK(std::abs(cube.derivative(3) - Complex(6.0)) < 1e-14);
    CHECK(std::abs(cube.derivative(2) - 6.0 * Complex(0.3, -0.2)) < 1e-14);
  }

  TEST_CASE("exp reproduces its own derivatives") {
    const Complex z(0.4, 1.1);
    Jet e = exp(Jet::variable(z, 7));
    for (std::size_t k = 0; k <= 7; ++k) CHECK(std::abs(e.derivative(k) - std::exp(z)) < 1e-12);
  }

  TEST_CASE("sinh and cosh alternate under differentiation") {
    const Complex z(-0.25, 0.6);
    const double beta = 4.32;
    auto [s, c] = sinh_cosh(Jet::variable(z, 6) * Complex(beta));
    double scale = 1.0;
    for (std::size_t k = 0; k <= 6; ++k) {
      const Complex ds = k % 2 == 0 ? std::sinh(beta * z) : std::cosh(beta * z);
      const Complex dc = k % 2 == 0 ? std::cosh(beta * z) : std::sinh(beta * z);
      CHECK(std::abs(s.derivative(k) - scale * ds) < 1e-11 * scale);
      CHECK(std::abs(c.derivative(k) - scale * dc) < 1e-11 * scale);
      scale *= beta;
    }
  }

  TEST_CASE("derivatives() lists every order") {
    Jet x = Jet::variable(Complex(2.0), 3);
    auto d = (x * x).derivatives();
    REQUIRE(d.size() == 4);
    CHECK(d[0] == Complex(4.0));
    CHECK(d[1] == Complex(4.0));
    CHECK(d[2] == Complex(2.0));
    CHECK(d[3] == Complex(0.0));
  }
}
