#include <doctest.h>

#include <cmath>
#include <random>

#include "bomca/error.hpp"
#include "bomca/model.hpp"

using namespace bomca;

namespace {

const PotentialModel kEckart = PotentialModel::eckart(40.0, 4.32);
const SystemSpec kSystem(30.0, kEckart);
const GaussianWavepacket kPacket(30.0 * kPi, -0.7, 0.0);

double rel(Complex got, Complex want) { return std::abs(got - want) / std::abs(want); }

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("Eckart value and derivatives at real points") {
    auto j = potential_jet(kEckart, Complex(0.0), 1);
    CHECK(std::abs(j[0] - Complex(40.0)) < 1e-13);
    CHECK(std::abs(j[1]) < 1e-13);

    // Reference values from tests/oracles/eckart_oracle.py (50-digit arithmetic).
    j = potential_jet(kEckart, Complex(0.5), 2);
    CHECK(rel(j[0], 2.0724870969044024715) < 1e-13);
    CHECK(rel(j[1], -17.436237043204101816) < 1e-13);
    CHECK(rel(j[2], 142.68651397170699055) < 1e-13);
  }

  TEST_CASE("Eckart derivatives at a complex point") {
    const Complex want[] = {
        {-0.09554960982107633255, -12.196407983872332166},
        {-15.031810844033422476, 106.81363595628431486},
        {409.25313052155051622, -916.98151310432013275},
        {-8423.8515274446242363, 7004.2994619600338375},
        {155996.52241399927405, -23018.658642516517175},
        {-2653419.0144921681077, -1014342.1339269628405},
        {38529387.207206522164, 44036316.445271662404},
    };
    auto j = potential_jet(kEckart, Complex(0.3, 0.2), 6);
    for (std::size_t k = 0; k <= 6; ++k) CHECK(rel(j[k], want[k]) < 1e-11);

    std::vector<Complex> out(7);
    potential_derivatives(kEckart, Complex(0.3, 0.2), out);
    for (std::size_t k = 0; k <= 6; ++k) CHECK(rel(out[k], want[k]) < 1e-11);
  }

  TEST_CASE("free and harmonic jets") {
    auto f = potential_jet(PotentialModel::free(), Complex(1.0, 2.0), 4);
    for (std::size_t k = 0; k <= 4; ++k) CHECK(f[k] == Complex(0.0));

    const Complex x(0.4, -0.3);
    auto h = potential_jet(PotentialModel::harmonic(2.5), x, 4);
    CHECK(std::abs(h[0] - 1.25 * x * x) < 1e-15);
    CHECK(std::abs(h[1] - 2.5 * x) < 1e-15);
    CHECK(std::abs(h[2] - Complex(2.5)) < 1e-15);
    CHECK(h[3] == Complex(0.0));
  }

  TEST_CASE("odd Eckart derivatives vanish at the barrier top") {
    auto j = potential_jet(kEckart, Complex(0.0), 7);
    for (std::size_t k = 1; k <= 7; k += 2) CHECK(std::abs(j[k]) < 1e-9 * std::abs(j[k - 1]));
  }

  TEST_CASE("Eckart is even and decays") {
    for (double x : {0.1, 0.7, 1.9}) CHECK(kEckart(x) == doctest::Approx(kEckart(-x)).epsilon(1e-15));
    CHECK(kEckart(10.0) < 1e-15);
  }

  TEST_CASE("jets agree with finite differences away from poles") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> re(-1.5, 1.5), im(-0.25, 0.25);
    const double h = 1e-5;
    for (int trial = 0; trial < 100; ++trial) {
      const Complex x(re(rng), im(rng));
      auto j = potential_jet(kEckart, x, 3);
      for (std::size_t k = 1; k <= 3; ++k) {
        auto lo = potential_jet(kEckart, x - h, k - 1)[k - 1];
        auto hi = potential_jet(kEckart, x + h, k - 1)[k - 1];
        const Complex fd = (hi - lo) / (2.0 * h);
        CHECK(std::abs(fd - j[k]) <= 1e-6 * std::max(1.0, std::abs(j[k])));
      }
      // Along the imaginary direction the complex derivative is d/d(iy) = -i d/dy.
      auto up = potential_jet(kEckart, x + Complex(0.0, h), 0)[0];
      auto dn = potential_jet(kEckart, x - Complex(0.0, h), 0)[0];
      const Complex fd_im = (up - dn) / (2.0 * kI * h);
      CHECK(std::abs(fd_im - j[1]) <= 1e-6 * std::max(1.0, std::abs(j[1])));
    }
  }

  TEST_CASE("pole proximity is reported") {
    const Complex pole(0.0, kPi / (2.0 * 4.32));
    CHECK(kind_of([&] { potential_jet(kEckart, pole, 2); }) == ErrorKind::PoleProximity);
  }

  TEST_CASE("scaled potential") {
    auto half = kEckart.scaled(0.5);
    CHECK(half(0.2) == doctest::Approx(0.5 * kEckart(0.2)).epsilon(1e-15));
    CHECK(PotentialModel::harmonic(2.0).scaled(3.0)(1.0) == doctest::Approx(3.0));
  }

  TEST_CASE("parameter validation") {
    CHECK(kind_of([] { SystemSpec(0.0, PotentialModel::free()); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { SystemSpec(1.0, PotentialModel::free(), -1.0); }) ==
          ErrorKind::InvalidArgument);
    CHECK(kind_of([] { GaussianWavepacket(0.0, 0.0, 0.0); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { GaussianWavepacket::from_energy(1.0, 0.0, -1.0, 1.0); }) ==
          ErrorKind::InvalidArgument);
  }

  TEST_CASE("momentum from energy") {
    auto wp = GaussianWavepacket::from_energy(30.0 * kPi, -0.7, 50.0, 30.0);
    CHECK(wp.momentum() == doctest::Approx(std::sqrt(3000.0)).epsilon(1e-15));
    CHECK(wp.energy(30.0) == doctest::Approx(50.0).epsilon(1e-14));
  }

  TEST_CASE("initial velocity jet of the Gaussian") {
    const GaussianWavepacket moving(30.0 * kPi, -0.7, 12.0);
    auto c = initial_velocity_jet(moving, kSystem, Complex(-0.7), 5);
    CHECK(std::abs(c[0] - Complex(12.0 / 30.0)) < 1e-15);
    CHECK(std::abs(c[1] - Complex(0.0, 2.0 * kPi)) < 1e-13);
    for (std::size_t n = 2; n <= 5; ++n) CHECK(c[n] == Complex(0.0));

    auto off = initial_velocity_jet(moving, kSystem, Complex(-0.6), 1);
    CHECK(std::abs(off[0] - Complex(0.4, 0.2 * kPi)) < 1e-13);
  }

  TEST_CASE("initial action reproduces the Gaussian") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> re(-1.5, 0.1), im(-0.3, 0.3);
    const GaussianWavepacket moving(30.0 * kPi, -0.7, 17.0);
    const double n0 = std::pow(60.0 * kPi / kPi, 0.25);
    CHECK(moving.norm_prefactor() == doctest::Approx(n0).epsilon(1e-15));
    for (int trial = 0; trial < 100; ++trial) {
      const Complex x(re(rng), im(rng));
      const Complex d = x + 0.7;
      const Complex psi = n0 * std::exp(-30.0 * kPi * d * d + kI * 17.0 * d);
      const Complex from_action = std::exp(kI * initial_action(moving, kSystem, x));
      CHECK(std::abs(from_action - psi) <= 1e-12 * std::abs(psi));
    }
    CHECK(std::abs(initial_action(kPacket, kSystem, Complex(-0.7)) -
                   Complex(0.0, -std::log(n0))) < 1e-14);
  }

  TEST_CASE("initial velocity matches the action gradient") {
    const GaussianWavepacket moving(30.0 * kPi, -0.7, 17.0);
    const double h = 1e-5;
    for (double xr : {-1.0, -0.7, -0.2}) {
      const Complex x(xr, 0.1);
      const Complex fd = (initial_action(moving, kSystem, x + h) -
                          initial_action(moving, kSystem, x - h)) / (2.0 * h);
      CHECK(std::abs(fd / 30.0 - initial_velocity_jet(moving, kSystem, x, 0)[0]) < 1e-8);
    }
  }
}
