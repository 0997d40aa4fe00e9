#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bomca/error.hpp"
#include "bomca/experiments.hpp"

using namespace bomca;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bomca_tests_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("window resolution") {
    const SystemSpec sys(30.0, PotentialModel::eckart(40.0, 4.32));
    const auto wp = GaussianWavepacket::from_energy(30.0 * kPi, -0.7, 0.0, 30.0);
    const double width = packet_width(wp, sys, 1.0);
    const double tau = 2.0 * 30.0 * kPi / 30.0;
    CHECK(width == doctest::Approx(std::sqrt((1.0 + tau * tau) / (120.0 * kPi))));

    auto t = resolve_window(WindowSpec::transmitted(), wp, sys, 1.0, 50, 0.0);
    CHECK(t.count == 50);
    CHECK(t.x_hi == doctest::Approx(8.0 * width));
    CHECK(t.x_lo == doctest::Approx(-2.0 * t.step()));
    CHECK(t.seed_target == doctest::Approx(0.5 * t.x_hi));

    auto r = resolve_window(WindowSpec::reflected(), wp, sys, 1.0, 50, 0.0);
    CHECK(r.count == 50);
    CHECK(r.x_lo == doctest::Approx(-0.7 - 8.0 * width));
    CHECK(r.seed_target == -0.7);

    auto e = resolve_window(WindowSpec::interval(-1.0, 1.0), wp, sys, 1.0, 21, 0.0);
    CHECK(e.count == 21);
    CHECK(e.step() == doctest::Approx(0.1));
    CHECK(e.seed_target == 0.0);
    CHECK_THROWS_AS(resolve_window(WindowSpec::interval(-1.0, 1.0), wp, sys, 1.0, 50, 1.0), Error);
  }

  TEST_CASE("trajectory output is deterministic across runs and thread counts") {
    auto c = preset("fig1");
    c.run.trajectories = 20;
    c.run.paths = 2;
    c.run.path_samples = 11;
    const auto a = scratch("det_a"), b = scratch("det_b");
    auto ra = run_trajectories(c, {a, 1, nullptr});
    auto rb = run_trajectories(c, {b, 2, nullptr});
    CHECK(ra.failures.empty());
    REQUIRE(ra.files.size() == rb.files.size());
    REQUIRE(ra.files.size() >= 3);
    for (std::size_t i = 0; i < ra.files.size(); ++i) {
      CAPTURE(ra.files[i]);
      CHECK(ra.files[i].filename() == rb.files[i].filename());
      CHECK(slurp(ra.files[i]) == slurp(rb.files[i]));
      fs::path meta_a = ra.files[i], meta_b = rb.files[i];
      meta_a += ".meta.json";
      meta_b += ".meta.json";
      REQUIRE(fs::exists(meta_a));
      CHECK(slurp(meta_a) == slurp(meta_b));
    }
    CHECK(first_line(a / "manifold_N1_transmitted.csv") ==
          "index,status,error,covered,re_x0,im_x0,re_xf,im_xf,re_S,im_S,re_v,im_v");
    CHECK(first_line(a / "path_N1_transmitted_0.csv").rfind("t,re_x,im_x,re_v0", 0) == 0);
  }

  TEST_CASE("free reconstruction through the pipeline") {
    auto c = preset("free");
    const auto dir = scratch("free");
    auto r = run_wavefunction(c, {dir, 1, nullptr});
    CHECK(r.failures.empty());
    REQUIRE(r.orders.size() == 1);
    REQUIRE(r.orders[0].max_deviation);
    CHECK(*r.orders[0].max_deviation < 1e-6);
    CHECK(first_line(dir / "wavefunction_exact.csv") == "x,re_psi,im_psi,abs2");
    CHECK(fs::exists(dir / "wavefunction_summary.json"));
  }

  TEST_CASE("explicit grids inside and outside the covered span") {
    auto c = preset("free");
    c.run.windows = {WindowSpec::interval(-0.5, 0.5)};
    c.run.trajectories = 20;
    c.run.grid = SampleGrid{-0.4, 0.4, 81};
    auto inside = run_wavefunction(c, {scratch("inside"), 1, nullptr});
    CHECK(inside.failures.empty());
    REQUIRE(inside.orders[0].max_deviation);
    CHECK(*inside.orders[0].max_deviation < 1e-6);

    c.run.grid = SampleGrid{-1.0, 0.5, 151};
    auto outside = run_wavefunction(c, {scratch("outside"), 1, nullptr});
    REQUIRE(outside.failures.size() == 1);
    CHECK(outside.failures[0].error.find("InsufficientCoverage") != std::string::npos);
    CHECK(outside.orders.empty());
  }

  TEST_CASE("tighter landing barely changes the reconstruction") {
    // Reference scale: the spline error, estimated from every other sample.
    auto c = preset("fig1");
    const SystemSpec sys = c.system();
    const auto wp = c.wavepacket();
    const auto window = resolve_window(WindowSpec::transmitted(), wp, sys, 1.0, 50, 0.0);
    const LaunchProblem problem{wp, sys, TruncationOrder(1), 1.0, c.run.integrator};
    ManifoldConfig loose = c.run.manifold, tight = c.run.manifold;
    tight.landing_tolerance = 0.1 * loose.landing_tolerance;
    const auto run_loose = march_window(problem, loose, window);
    const auto run_tight = march_window(problem, tight, window);
    const auto psi_loose = reconstruct_run(run_loose, c.oracle.grid, sys, loose, 1.0);
    const auto psi_tight = reconstruct_run(run_tight, psi_loose.grid, sys, tight, 1.0);

    std::vector<ManifoldSample> half;
    for (std::size_t i = 0; i < run_loose.covered().size(); i += 2)
      half.push_back(run_loose.covered()[i]);
    std::vector<double> common;
    for (double x : psi_loose.grid)
      if (x >= half.front().x_f.real() && x <= half.back().x_f.real()) common.push_back(x);
    const auto psi_half = reconstruct_wavefunction(half, common, sys);

    double change = 0.0, spline_error = 0.0;
    for (std::size_t i = 0, j = 0; i < psi_loose.grid.size(); ++i) {
      change = std::max(change, std::abs(std::abs(psi_loose.psi[i]) - std::abs(psi_tight.psi[i])));
      if (j < common.size() && psi_loose.grid[i] == common[j])
        spline_error = std::max(spline_error,
                                std::abs(std::abs(psi_loose.psi[i]) - std::abs(psi_half.psi[j++])));
    }
    CAPTURE(change);
    CAPTURE(spline_error);
    CHECK(change < spline_error);
  }

  TEST_CASE("transmission sweep at a single energy") {
    auto c = preset("fig3");
    c.run.energies = {30.0};
    c.run.orders = {1, 4};
    const auto dir = scratch("sweep");
    auto curve = run_transmission(c, {dir, 1, nullptr});
    CHECK(curve.failures.empty());
    REQUIRE(curve.entries.size() == 1);
    const auto& e = curve.entries[0];
    REQUIRE(e.exact);
    CHECK(e.t_f >= 1.0);
    CHECK(e.exact->transmission == doctest::Approx(0.261).epsilon(0.05));
    REQUIRE(e.orders.size() == 2);
    REQUIRE(e.orders[1].relative_divergence);
    CHECK(*e.orders[1].relative_divergence < 0.05);
    CHECK(first_line(dir / "transmission.csv") ==
          "energy,order,t_f,t_exact,t_bomca,relative_divergence,trajectories,status,error");

    c.run.energies.clear();
    CHECK_THROWS_AS(run_transmission(c, {dir, 1, nullptr}), Error);
  }

  TEST_CASE("oracle command and self-test") {
    auto c = preset("fig2a");
    const auto dir = scratch("oracle");
    auto r = run_oracle(c, {dir, 1, nullptr});
    CHECK(r.failures.empty());
    CHECK(r.result.norm == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fs::exists(dir / "oracle.json"));

    std::ostringstream log;
    CHECK(run_selftest(log) == 0);
    CHECK(log.str().find("FAIL") == std::string::npos);
  }
}
