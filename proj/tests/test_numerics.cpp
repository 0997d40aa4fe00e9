#include <doctest.h>

#include <cmath>
#include <vector>

#include "bomca/error.hpp"
#include "bomca/ode.hpp"
#include "bomca/quadrature.hpp"
#include "bomca/spline.hpp"

using namespace bomca;

TEST_SUITE("numerics") {
  TEST_CASE("not-a-knot spline reproduces cubics") {
    auto f = [](double x) { return Complex(1.0 - 2.0 * x + 0.5 * x * x * x, x * x - 3.0); };
    std::vector<double> x{-1.0, -0.4, 0.1, 0.3, 0.9, 1.7, 2.0};
    std::vector<Complex> y;
    for (double xi : x) y.push_back(f(xi));
    ComplexSpline s(x, y);
    for (double t = -1.0; t <= 2.0; t += 0.037) {
      CHECK(std::abs(s(t) - f(t)) < 1e-12);
      const Complex df(-2.0 + 1.5 * t * t, 2.0 * t);
      CHECK(std::abs(s.derivative(t) - df) < 1e-11);
    }
  }

  TEST_CASE("short splines") {
    ComplexSpline line({0.0, 2.0}, {Complex(1.0), Complex(3.0, 2.0)});
    CHECK(std::abs(line(1.0) - Complex(2.0, 1.0)) < 1e-15);
    ComplexSpline para({0.0, 1.0, 3.0}, {Complex(0.0), Complex(1.0), Complex(9.0)});
    CHECK(std::abs(para(2.0) - Complex(4.0)) < 1e-14);
  }

  TEST_CASE("spline rejects bad abscissae") {
    CHECK_THROWS_AS(ComplexSpline({0.0, 1.0, 1.0}, {Complex(0.0), Complex(1.0), Complex(2.0)}), Error);
    CHECK_THROWS_AS(ComplexSpline({0.0}, {Complex(0.0)}), Error);
  }

  TEST_CASE("spline converges at fourth order") {
    auto err = [](int n) {
      std::vector<double> x;
      std::vector<Complex> y;
      for (int i = 0; i <= n; ++i) {
        x.push_back(3.0 * i / n);
        y.push_back(std::exp(Complex(0.0, 2.0) * x.back()));
      }
      ComplexSpline s(x, y);
      double e = 0.0;
      for (double t = 0.0; t <= 3.0; t += 0.001)
        e = std::max(e, std::abs(s(t) - std::exp(Complex(0.0, 2.0 * t))));
      return e;
    };
    const double ratio = err(40) / err(80);
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
  }

  TEST_CASE("Simpson is exact for cubics on even and odd interval counts") {
    for (int n : {2, 3, 4, 7, 10}) {
      CAPTURE(n);
      const double h = 2.0 / n;
      std::vector<double> f;
      for (int i = 0; i <= n; ++i) {
        const double x = -1.0 + i * h;
        f.push_back(x * x * x + 2.0 * x * x + 1.0);
      }
      CHECK(simpson(f, h) == doctest::Approx(2.0 + 4.0 / 3.0).epsilon(1e-13));
    }
    std::vector<double> two{1.0, 3.0};
    CHECK(simpson(two, 0.5) == doctest::Approx(1.0));
  }

  TEST_CASE("complex integrator on a rotating solution") {
    auto rhs = [](double, std::span<const Complex> y, std::span<Complex> d) {
      d[0] = Complex(0.0, 1.0) * y[0];
    };
    ode::StepControl ctl;
    ctl.max_step = 0.1;
    std::vector<double> out{0.5, 1.0, 2.0};
    auto sol = ode::integrate(rhs, {Complex(1.0)}, 0.0, 2.0, ctl, out);
    REQUIRE(sol.samples.size() == 3);
    for (const auto& s : sol.samples) {
      CHECK(std::abs(s.y[0] - std::exp(Complex(0.0, s.t))) < 1e-9);
    }
    CHECK(sol.samples[1].t == 1.0);
  }

  TEST_CASE("step check aborts the integration") {
    auto rhs = [](double, std::span<const Complex>, std::span<Complex> d) { d[0] = 1.0; };
    auto check = [](double t, std::span<const Complex>) {
      if (t > 0.5) throw Error(ErrorKind::Blowup, "stop");
    };
    CHECK_THROWS_AS(ode::integrate(rhs, {Complex(0.0)}, 0.0, 1.0, ode::StepControl{}, {}, check),
                    Error);
  }
}
