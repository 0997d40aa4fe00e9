#include <doctest.h>

#include <string>

#include "bomca/error.hpp"
#include "bomca/scenario.hpp"

using namespace bomca;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

bool rejected(const std::string& yaml) {
  return kind_of([&] { parse_config(yaml); }) == ErrorKind::InvalidConfig;
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("defaults describe the Eckart barrier scenario") {
    auto c = parse_config("wavepacket: {energy: 25}");
    CHECK(c.mass == 30.0);
    CHECK(c.hbar == 1.0);
    CHECK(c.alpha == doctest::Approx(30.0 * kPi));
    CHECK(c.x_c == -0.7);
    const auto* e = c.potential.as<EckartBarrier>();
    REQUIRE(e);
    CHECK(e->height == 40.0);
    CHECK(e->steepness == 4.32);
    CHECK(c.momentum() == doctest::Approx(std::sqrt(1500.0)));
    CHECK_FALSE(c.run.t_f.has_value());
  }

  TEST_CASE("full document") {
    auto c = parse_config(R"(
name: sweep
system:
  mass: 2.0
  hbar: 0.5
  potential: {type: harmonic, stiffness: 3.0}
wavepacket: {alpha: 4.0, x_c: 0.1, p_c: -1.5}
run:
  t_f: 0.75
  orders: [1, 3]
  trajectories: 40
  windows: [reflected, {x_lo: -1, x_hi: 1, seed: 0.2}]
  grid: {x_min: -0.5, x_max: 0.5, points: 11}
  energies: [1, 2]
  integrator: {rel_tol: 1.0e-9, max_step: 0.01}
  manifold: {landing_tolerance: 1.0e-5, max_recenter: 2}
oracle: {dt: 2.0e-4, x_min: -8, x_max: 8, points: 2048, absorber: true}
output: {directory: results, formats: [json]}
)");
    CHECK(c.name == "sweep");
    CHECK(c.potential.as<HarmonicWell>()->stiffness == 3.0);
    CHECK(*c.p_c == -1.5);
    CHECK(*c.run.t_f == 0.75);
    CHECK(c.run.orders == std::vector<int>{1, 3});
    REQUIRE(c.run.windows.size() == 2);
    CHECK(c.run.windows[0].kind == WindowKind::Reflected);
    CHECK(c.run.windows[1].kind == WindowKind::Explicit);
    CHECK(*c.run.windows[1].seed == 0.2);
    REQUIRE(c.run.grid);
    CHECK(c.run.grid->values().size() == 11);
    CHECK(c.run.grid->values()[5] == doctest::Approx(0.0));
    CHECK(c.run.integrator.rel_tol == 1e-9);
    CHECK(c.run.manifold.max_recenter == 2);
    CHECK(c.oracle.grid.n_points == 2048);
    CHECK(c.oracle.absorber);
    CHECK(c.wants_format("json"));
    CHECK_FALSE(c.wants_format("csv"));
    CHECK(c.transmission_options().propagation.absorber.has_value());
  }

  TEST_CASE("invalid documents are rejected before any computation") {
    CHECK(rejected("wavepacket: {energy: 1}\nrun: {orders: [0]}"));
    CHECK(rejected("wavepacket: {energy: 1}\nrun: {orders: [9]}"));
    CHECK(rejected("wavepacket: {energy: 1}\nrun: {orders: []}"));
    CHECK(rejected("wavepacket: {energy: 1, p_c: 2}"));
    CHECK(rejected("wavepacket: {x_c: 0}"));
    CHECK(rejected("wavepacket: {energy: -1}"));
    CHECK(rejected("wavepacket: {energy: 1}\nextra: 1"));
    CHECK(rejected("wavepacket: {energy: 1}\nrun: {trajectorys: 10}"));
    CHECK(rejected("wavepacket: {energy: 1}\nrun: {trajectories: many}"));
    CHECK(rejected("wavepacket: {energy: 1}\nrun: {t_f: -1}"));
    CHECK(rejected("wavepacket: {energy: 1}\nrun: {windows: [sideways]}"));
    CHECK(rejected("wavepacket: {energy: 1}\nrun: {windows: [{x_lo: 1, x_hi: 0}]}"));
    CHECK(rejected("wavepacket: {energy: 1}\nrun: {grid: {x_min: 0, x_max: 1}}"));
    CHECK(rejected("wavepacket: {energy: 1}\nsystem: {mass: 0}"));
    CHECK(rejected("wavepacket: {energy: 1}\nsystem: {potential: {type: morse}}"));
    CHECK(rejected("wavepacket: {energy: 1}\nsystem: {potential: {type: eckart, width: 2}}"));
    CHECK(rejected("wavepacket: {energy: 1}\noracle: {points: 1000}"));
    CHECK(rejected("wavepacket: {energy: 1}\noutput: {formats: [xml]}"));
    CHECK(rejected("wavepacket: {energy: 1}\nrun: {manifold: {landing_tolerance: 0}}"));
    CHECK(rejected("- 1\n- 2"));
    CHECK(rejected("a: [unclosed"));
    CHECK(kind_of([] { load_config("/nonexistent/config.yaml"); }) == ErrorKind::InvalidConfig);
  }

  TEST_CASE("presets") {
    for (const auto& name : preset_names()) {
      CAPTURE(name);
      CHECK_NOTHROW(preset(name).validate());
    }
    CHECK(preset("fig1").run.orders == std::vector<int>{1});
    CHECK(*preset("fig2a").energy == 50.0);
    CHECK(*preset("fig2a").run.t_f == 0.85);
    CHECK(preset("fig2a").run.windows.size() == 2);
    CHECK(preset("fig2b").run.orders == std::vector<int>{1, 2, 3, 4});
    CHECK(preset("fig3").run.energies.size() == 25);
    CHECK(preset("fig3").run.energies.back() == 60.0);
    CHECK_FALSE(preset("fig3").run.t_f.has_value());
    CHECK(preset("free").potential.as<FreeSpace>() != nullptr);
    CHECK(kind_of([] { preset("fig9"); }) == ErrorKind::InvalidConfig);
  }

  TEST_CASE("resolved configs round-trip through JSON") {
    for (const auto& name : preset_names()) {
      CAPTURE(name);
      auto c = preset(name);
      c.run.grid = SampleGrid{-0.25, 0.75, 21};
      const auto j = to_json(c);
      CHECK(to_json(parse_config(j.dump())) == j);
    }
  }
}
