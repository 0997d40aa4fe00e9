#include "bomca/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>

#include "bomca/error.hpp"
#include "bomca/jet.hpp"
#include "bomca/output.hpp"
#include "bomca/parallel.hpp"

namespace bomca {

namespace {

void note(const RunContext& ctx, const std::string& line) {
  if (ctx.log) *ctx.log << line << '\n';
}

std::string describe(const std::exception& e) { return e.what(); }

LaunchProblem make_problem(const ScenarioConfig& c, const GaussianWavepacket& wp, int order,
                           double t_f) {
  return LaunchProblem{wp, c.system(), TruncationOrder(order), t_f, c.run.integrator};
}

double resolve_t_f(const ScenarioConfig& c, const GaussianWavepacket& wp) {
  if (c.run.t_f) return *c.run.t_f;
  return asymptotic_transmission(wp, c.system(), c.oracle.t_start, c.oracle.t_step,
                                 c.oracle.t_max, c.transmission_options())
      .t_f;
}

std::string window_label(const WindowSpec& w, std::size_t index) {
  switch (w.kind) {
    case WindowKind::Transmitted:
      return "transmitted";
    case WindowKind::Reflected:
      return "reflected";
    case WindowKind::Explicit:
      break;
  }
  return "window" + std::to_string(index);
}

std::string samples_csv(const ManifoldRun& run) {
  std::ostringstream os;
  os << "index,status,error,covered,re_x0,im_x0,re_xf,im_xf,re_S,im_S,re_v,im_v\n";
  for (std::size_t i = 0; i < run.samples.size(); ++i) {
    const auto& s = run.samples[i];
    const bool covered = i >= run.covered_begin && i < run.covered_end;
    os << i << ',' << (s.ok() ? "ok" : "dead") << ','
       << (s.failure ? std::string(to_string(*s.failure)) : "") << ',' << (covered ? 1 : 0) << ','
       << format_double(s.x0.real()) << ',' << format_double(s.x0.imag()) << ','
       << format_double(s.x_f.real()) << ',' << format_double(s.x_f.imag()) << ','
       << format_double(s.S_f.real()) << ',' << format_double(s.S_f.imag()) << ','
       << format_double(s.v_f.real()) << ',' << format_double(s.v_f.imag()) << '\n';
  }
  return os.str();
}

std::string grid_csv(std::span<const double> x, std::span<const Complex> psi) {
  std::ostringstream os;
  os << "x,re_psi,im_psi,abs2\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    os << format_double(x[i]) << ',' << format_double(psi[i].real()) << ','
       << format_double(psi[i].imag()) << ',' << format_double(std::norm(psi[i])) << '\n';
  return os.str();
}

std::string path_csv(std::span<const TrajectoryState> path) {
  std::ostringstream os;
  os.precision(17);
  write_path_csv(os, path);
  return os.str();
}

nlohmann::json window_json(const Window& w) {
  return {{"label", w.label},
          {"x_lo", w.x_lo},
          {"x_hi", w.x_hi},
          {"seed_target", w.seed_target},
          {"count", w.count}};
}

// Index range [first, last) of grid points lying within [lo, hi].
std::pair<std::size_t, std::size_t> grid_range(const GridSpec& grid, double lo, double hi) {
  const double h = grid.spacing();
  const auto n = static_cast<long>(grid.n_points);
  const long first = std::clamp<long>(static_cast<long>(std::ceil((lo - grid.x_min) / h)), 0, n);
  const long last = std::clamp<long>(static_cast<long>(std::floor((hi - grid.x_min) / h)) + 1, 0, n);
  return {static_cast<std::size_t>(first), static_cast<std::size_t>(std::max(first, last))};
}

WindowSpec transmission_window(const ScenarioConfig& c) {
  for (const auto& w : c.run.windows)
    if (w.kind != WindowKind::Reflected) return w;
  throw Error(ErrorKind::InvalidConfig, "transmission needs a transmitted or explicit window");
}

}  // namespace

double packet_width(const GaussianWavepacket& wp, const SystemSpec& sys, double t) {
  const double tau = 2.0 * sys.hbar() * wp.alpha() * t / sys.mass();
  const double re_alpha = wp.alpha() / (1.0 + tau * tau);
  return 1.0 / (2.0 * std::sqrt(re_alpha));
}

Window resolve_window(const WindowSpec& spec, const GaussianWavepacket& wp, const SystemSpec& sys,
                      double t_f, int trajectories, double march_step) {
  if (trajectories < 5) throw Error(ErrorKind::InvalidArgument, "need at least 5 trajectories");
  const double width = packet_width(wp, sys, t_f);
  const double drift = wp.momentum() * t_f / sys.mass();
  Window w;
  switch (spec.kind) {
    case WindowKind::Transmitted: {
      w.label = "transmitted";
      const double hi = std::max(wp.center() + drift, 0.0) + 8.0 * width;
      const double dx = march_step > 0.0 ? march_step : hi / (trajectories - 3);
      w.x_hi = hi;
      w.x_lo = -2.0 * dx;
      w.seed_target = 0.5 * hi;
      w.count = static_cast<int>(std::lround((w.x_hi - w.x_lo) / dx)) + 1;
      break;
    }
    case WindowKind::Reflected: {
      w.label = "reflected";
      const double lo = std::min(wp.center() - std::abs(drift), wp.center()) - 8.0 * width;
      const double dx = march_step > 0.0 ? march_step : -lo / (trajectories - 3);
      w.x_lo = lo;
      w.x_hi = 2.0 * dx;
      w.seed_target = wp.center();
      w.count = static_cast<int>(std::lround((w.x_hi - w.x_lo) / dx)) + 1;
      break;
    }
    case WindowKind::Explicit: {
      w.label = "window";
      w.x_lo = spec.x_lo;
      w.x_hi = spec.x_hi;
      w.seed_target = spec.seed.value_or(0.5 * (spec.x_lo + spec.x_hi));
      w.count = march_step > 0.0
                    ? static_cast<int>(std::lround((w.x_hi - w.x_lo) / march_step)) + 1
                    : trajectories;
      break;
    }
  }
  if (w.count < 5) throw Error(ErrorKind::InvalidArgument, "window holds fewer than 5 arrivals");
  return w;
}

std::size_t ManifoldRun::live() const {
  const auto c = covered();
  return static_cast<std::size_t>(std::count_if(c.begin(), c.end(), [](const auto& s) { return s.ok(); }));
}

ManifoldRun march_window(const LaunchProblem& problem, const ManifoldConfig& cfg,
                         const Window& window) {
  ManifoldRun run;
  run.window = window;
  run.samples =
      trace_manifold(problem, cfg, window.x_lo, window.x_hi, window.count, window.seed_target);
  std::size_t anchor = run.samples.size();
  double best = HUGE_VAL;
  for (std::size_t i = 0; i < run.samples.size(); ++i) {
    const auto& s = run.samples[i];
    if (s.ok() && std::abs(s.x_f.real() - window.seed_target) < best) {
      best = std::abs(s.x_f.real() - window.seed_target);
      anchor = i;
    }
  }
  // A gap of k dead samples spans k + 1 march steps.
  const int max_dead = std::max(0, static_cast<int>(std::ceil(cfg.max_gap_ratio)) - 2);
  const auto covered = covered_run(run.samples, anchor, max_dead);
  run.covered_begin = static_cast<std::size_t>(covered.data() - run.samples.data());
  run.covered_end = run.covered_begin + covered.size();
  return run;
}

ReconstructedWavefunction reconstruct_run(const ManifoldRun& run, const GridSpec& grid,
                                          const SystemSpec& sys, const ManifoldConfig& cfg,
                                          double t_f) {
  double lo = HUGE_VAL, hi = -HUGE_VAL;
  for (const auto& s : run.covered())
    if (s.ok()) {
      lo = std::min(lo, s.x_f.real());
      hi = std::max(hi, s.x_f.real());
    }
  const auto [first, last] = grid_range(grid, lo, hi);
  std::vector<double> x;
  for (std::size_t i = first; i < last; ++i) x.push_back(grid.point(i));
  if (x.size() < 2)
    throw Error(ErrorKind::InsufficientCoverage, "covered span holds fewer than two grid points");
  return reconstruct_run(run, x, sys, cfg, t_f);
}

ReconstructedWavefunction reconstruct_run(const ManifoldRun& run, std::span<const double> grid,
                                          const SystemSpec& sys, const ManifoldConfig& cfg,
                                          double t_f) {
  return reconstruct_wavefunction(run.covered(), grid, sys,
                                  ReconstructionOptions{t_f, cfg.landing_tolerance,
                                                        cfg.max_gap_ratio});
}

GridWavefunction oracle_state(const ScenarioConfig& c, const GaussianWavepacket& wp, double t) {
  const SystemSpec sys = c.system();
  GridWavefunction psi = sample_wavepacket(wp, c.oracle.grid, sys.hbar());
  const long n = std::max<long>(1, static_cast<long>(std::ceil(t / c.oracle.dt - 1e-9)));
  SplitOperatorOptions opts;
  if (c.oracle.absorber) opts.absorber = AbsorberSpec{};
  return split_operator_propagate(psi, sys, t / static_cast<double>(n), n, opts);
}

TrajectoriesReport run_trajectories(const ScenarioConfig& c, const RunContext& ctx) {
  c.validate();
  TrajectoriesReport report;
  const SystemSpec sys = c.system();
  const GaussianWavepacket wp = c.wavepacket();
  report.t_f = resolve_t_f(c, wp);
  const double t_f = report.t_f;

  std::vector<double> times(static_cast<std::size_t>(c.run.path_samples));
  for (std::size_t i = 0; i < times.size(); ++i)
    times[i] = t_f * static_cast<double>(i) / static_cast<double>(times.size() - 1);

  for (int order : c.run.orders) {
    const LaunchProblem problem = make_problem(c, wp, order, t_f);
    for (std::size_t wi = 0; wi < c.run.windows.size(); ++wi) {
      const std::string tag = "N" + std::to_string(order) + "_" + window_label(c.run.windows[wi], wi);
      try {
        const Window window =
            resolve_window(c.run.windows[wi], wp, sys, t_f, c.run.trajectories, c.run.march_step);
        ManifoldRun run = march_window(problem, c.run.manifold, window);
        note(ctx, "trajectories " + tag + ": " + std::to_string(run.live()) + " live of " +
                      std::to_string(run.samples.size()));

        nlohmann::json dead = nlohmann::json::array();
        for (std::size_t i = 0; i < run.samples.size(); ++i)
          if (!run.samples[i].ok())
            dead.push_back({{"index", i}, {"error", to_string(*run.samples[i].failure)}});
        const auto manifold_file = ctx.out / ("manifold_" + tag + ".csv");
        write_with_sidecar(manifold_file, samples_csv(run), c, "trajectories",
                           {{"t_f", t_f}, {"order", order}, {"window", window_json(window)},
                            {"dead", dead}});
        report.files.push_back(manifold_file);

        // Evenly spread picks among the live covered samples.
        std::vector<std::size_t> live;
        for (std::size_t i = run.covered_begin; i < run.covered_end; ++i)
          if (run.samples[i].ok()) live.push_back(i);
        const std::size_t picks = std::min<std::size_t>(live.size(), c.run.paths);
        for (std::size_t k = 0; k < picks; ++k) {
          const std::size_t idx =
              picks == 1 ? live[live.size() / 2] : live[k * (live.size() - 1) / (picks - 1)];
          const auto path = propagate_trajectory(run.samples[idx].x0, wp, sys, problem.order, t_f,
                                                 c.run.integrator, times);
          const auto file = ctx.out / ("path_" + tag + "_" + std::to_string(k) + ".csv");
          write_with_sidecar(file, path_csv(path.path), c, "trajectories",
                             {{"t_f", t_f}, {"order", order}, {"sample_index", idx}});
          report.files.push_back(file);
        }
        report.runs.emplace_back(order, std::move(run));
      } catch (const Error& e) {
        report.failures.push_back({tag, describe(e)});
        note(ctx, "trajectories " + tag + " failed: " + describe(e));
      }
    }
  }
  return report;
}

WavefunctionReport run_wavefunction(const ScenarioConfig& c, const RunContext& ctx) {
  c.validate();
  WavefunctionReport report;
  const SystemSpec sys = c.system();
  const GaussianWavepacket wp = c.wavepacket();
  report.t_f = resolve_t_f(c, wp);
  const double t_f = report.t_f;
  const GridWavefunction exact = oracle_state(c, wp, t_f);
  const GridSpec& grid = exact.grid;
  // An explicit grid is compared against the band-limited interpolant of the oracle.
  const std::vector<double> explicit_grid = c.run.grid ? c.run.grid->values() : std::vector<double>{};
  const std::vector<Complex> exact_explicit =
      c.run.grid ? fourier_interpolate(exact, explicit_grid) : std::vector<Complex>{};
  const double measure = c.run.grid ? explicit_grid[1] - explicit_grid[0] : grid.spacing();

  const auto exact_file = ctx.out / "wavefunction_exact.csv";
  if (c.wants_format("csv")) {
    write_with_sidecar(exact_file, grid_csv(grid.points(), exact.psi), c, "wavefunction",
                       {{"t_f", t_f}, {"norm", exact.norm()}});
    report.files.push_back(exact_file);
  }

  // One reconstruction per (order, window), computed in parallel.
  struct Item {
    int order;
    std::size_t window;
    std::optional<ReconstructedWavefunction> psi;
    std::optional<Window> resolved;
    std::string error;
  };
  std::vector<Item> items;
  for (int order : c.run.orders)
    for (std::size_t wi = 0; wi < c.run.windows.size(); ++wi) items.push_back({order, wi, {}, {}, {}});
  parallel_for(items.size(), ctx.threads, [&](std::size_t i) {
    Item& item = items[i];
    try {
      const Window window = resolve_window(c.run.windows[item.window], wp, sys, t_f,
                                           c.run.trajectories, c.run.march_step);
      item.resolved = window;
      const ManifoldRun run =
          march_window(make_problem(c, wp, item.order, t_f), c.run.manifold, window);
      item.psi = c.run.grid ? reconstruct_run(run, explicit_grid, sys, c.run.manifold, t_f)
                            : reconstruct_run(run, grid, sys, c.run.manifold, t_f);
    } catch (const Error& e) {
      item.error = describe(e);
    }
  });

  nlohmann::json summary = nlohmann::json::array();
  for (std::size_t wi = 0; wi < c.run.windows.size(); ++wi) {
    // Deviations are compared on the span every order covers.
    double lo = -HUGE_VAL, hi = HUGE_VAL;
    for (const auto& item : items)
      if (item.window == wi && item.psi) {
        lo = std::max(lo, item.psi->grid.front());
        hi = std::min(hi, item.psi->grid.back());
      }
    for (auto& item : items) {
      if (item.window != wi) continue;
      const std::string tag =
          "N" + std::to_string(item.order) + "_" + window_label(c.run.windows[wi], wi);
      nlohmann::json entry = {{"order", item.order}, {"window", window_label(c.run.windows[wi], wi)}};
      if (!item.psi) {
        report.failures.push_back({tag, item.error});
        note(ctx, "wavefunction " + tag + " failed: " + item.error);
        entry["error"] = item.error;
        summary.push_back(entry);
        continue;
      }
      const auto& psi = *item.psi;
      double sq = 0.0, worst = 0.0;
      for (std::size_t k = 0; k < psi.grid.size(); ++k) {
        if (psi.grid[k] < lo - 1e-12 || psi.grid[k] > hi + 1e-12) continue;
        Complex want;
        if (c.run.grid) {
          want = exact_explicit[k];
        } else {
          const auto g =
              static_cast<std::size_t>(std::lround((psi.grid[k] - grid.x_min) / grid.spacing()));
          want = exact.psi[g];
        }
        const double d = std::abs(psi.psi[k]) - std::abs(want);
        sq += d * d;
        worst = std::max(worst, std::abs(d));
      }
      const double l2 = std::sqrt(sq * measure);
      entry["l2_deviation"] = l2;
      entry["max_deviation"] = worst;
      entry["trajectories"] = psi.trajectories;
      entry["compared_span"] = {lo, hi};
      entry["window_bounds"] = window_json(*item.resolved);
      summary.push_back(entry);
      note(ctx, "wavefunction " + tag + ": L2 deviation " + format_double(l2));

      auto it = std::find_if(report.orders.begin(), report.orders.end(),
                             [&](const auto& o) { return o.order == item.order; });
      if (it == report.orders.end()) {
        report.orders.push_back({item.order, 0.0, 0.0, 0});
        it = report.orders.end() - 1;
      }
      if (it->l2_deviation) {
        it->l2_deviation = std::hypot(*it->l2_deviation, l2);
        it->max_deviation = std::max(*it->max_deviation, worst);
      }
      it->trajectories += psi.trajectories;

      if (c.wants_format("csv")) {
        const auto file = ctx.out / ("wavefunction_" + tag + ".csv");
        write_with_sidecar(file, grid_csv(psi.grid, psi.psi), c, "wavefunction",
                           {{"t_f", t_f}, {"order", item.order}, {"trajectories", psi.trajectories},
                            {"landing_tolerance", psi.landing_tolerance}});
        report.files.push_back(file);
      }
    }
  }
  // Orders with any failed window carry no deviation.
  for (auto& o : report.orders)
    for (const auto& item : items)
      if (item.order == o.order && !item.psi) {
        o.l2_deviation.reset();
        o.max_deviation.reset();
      }
  std::sort(report.orders.begin(), report.orders.end(),
            [](const auto& a, const auto& b) { return a.order < b.order; });

  const auto summary_file = ctx.out / "wavefunction_summary.json";
  write_with_sidecar(summary_file, nlohmann::json{{"t_f", t_f}, {"entries", summary}}.dump(2) + "\n",
                     c, "wavefunction");
  report.files.push_back(summary_file);
  return report;
}

TransmissionCurve run_transmission(const ScenarioConfig& c, const RunContext& ctx) {
  c.validate();
  if (c.run.energies.empty())
    throw Error(ErrorKind::InvalidConfig, "transmission needs a non-empty run.energies list");
  const SystemSpec sys = c.system();
  const WindowSpec window_spec = transmission_window(c);
  TransmissionCurve curve;
  curve.entries.resize(c.run.energies.size());

  // Exact values (and the asymptotic time) per energy.
  parallel_for(curve.entries.size(), ctx.threads, [&](std::size_t i) {
    auto& entry = curve.entries[i];
    entry.energy = c.run.energies[i];
    const auto wp = c.wavepacket_at_energy(entry.energy);
    try {
      const auto opts = c.transmission_options();
      entry.exact = c.run.t_f ? transmission_exact(wp, sys, *c.run.t_f, opts)
                              : asymptotic_transmission(wp, sys, c.oracle.t_start, c.oracle.t_step,
                                                        c.oracle.t_max, opts);
      entry.t_f = entry.exact->t_f;
    } catch (const Error& e) {
      entry.exact_error = describe(e);
      entry.t_f = c.run.t_f.value_or(c.oracle.t_start);
    }
  });

  struct Item {
    std::size_t entry;
    int order;
  };
  std::vector<Item> items;
  for (std::size_t i = 0; i < curve.entries.size(); ++i) {
    for (int order : c.run.orders) {
      curve.entries[i].orders.push_back({order, {}, {}, 0, {}});
      items.push_back({i, order});
    }
  }
  std::mutex log_mutex;
  parallel_for(items.size(), ctx.threads, [&](std::size_t k) {
    auto& entry = curve.entries[items[k].entry];
    auto& result = *std::find_if(entry.orders.begin(), entry.orders.end(),
                                 [&](const auto& o) { return o.order == items[k].order; });
    const auto wp = c.wavepacket_at_energy(entry.energy);
    try {
      const Window window =
          resolve_window(window_spec, wp, sys, entry.t_f, c.run.trajectories, c.run.march_step);
      const ManifoldRun run =
          march_window(make_problem(c, wp, result.order, entry.t_f), c.run.manifold, window);
      const auto psi = reconstruct_run(run, c.oracle.grid, sys, c.run.manifold, entry.t_f);
      result.transmission = transmission_probability(psi);
      result.trajectories = psi.trajectories;
      if (entry.exact && entry.exact->transmission > 0.0)
        result.relative_divergence =
            std::abs(*result.transmission - entry.exact->transmission) / entry.exact->transmission;
    } catch (const Error& e) {
      result.error = describe(e);
    }
    std::lock_guard lock(log_mutex);
    note(ctx, "transmission E=" + format_double(entry.energy) + " N=" +
                  std::to_string(result.order) + ": " +
                  (result.transmission ? format_double(*result.transmission) : result.error));
  });

  for (const auto& entry : curve.entries) {
    const std::string e = "E=" + format_double(entry.energy);
    if (!entry.exact) curve.failures.push_back({e + " exact", entry.exact_error});
    for (const auto& o : entry.orders)
      if (!o.transmission) curve.failures.push_back({e + " N=" + std::to_string(o.order), o.error});
  }

  nlohmann::json details = {{"failures", curve.failures.size()}};
  if (c.wants_format("csv")) {
    std::ostringstream os;
    os << "energy,order,t_f,t_exact,t_bomca,relative_divergence,trajectories,status,error\n";
    for (const auto& entry : curve.entries)
      for (const auto& o : entry.orders) {
        const bool ok = o.transmission && entry.exact;
        std::string error = !entry.exact ? entry.exact_error : o.error;
        std::replace(error.begin(), error.end(), ',', ';');
        os << format_double(entry.energy) << ',' << o.order << ',' << format_double(entry.t_f) << ','
           << (entry.exact ? format_double(entry.exact->transmission) : "") << ','
           << (o.transmission ? format_double(*o.transmission) : "") << ','
           << (o.relative_divergence ? format_double(*o.relative_divergence) : "") << ','
           << o.trajectories << ',' << (ok ? "ok" : "failed") << ',' << error << '\n';
      }
    const auto file = ctx.out / "transmission.csv";
    write_with_sidecar(file, os.str(), c, "transmission", details);
    curve.files.push_back(file);
  }
  if (c.wants_format("json")) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& entry : curve.entries) {
      nlohmann::json e = {{"energy", entry.energy}, {"t_f", entry.t_f}};
      if (entry.exact) {
        e["t_exact"] = entry.exact->transmission;
        e["flux"] = entry.exact->flux;
        e["norm"] = entry.exact->norm;
      } else {
        e["exact_error"] = entry.exact_error;
      }
      nlohmann::json orders = nlohmann::json::array();
      for (const auto& o : entry.orders) {
        nlohmann::json r = {{"order", o.order}, {"trajectories", o.trajectories}};
        if (o.transmission) r["t_bomca"] = *o.transmission;
        if (o.relative_divergence) r["relative_divergence"] = *o.relative_divergence;
        if (!o.error.empty()) r["error"] = o.error;
        orders.push_back(r);
      }
      e["orders"] = orders;
      entries.push_back(e);
    }
    const auto file = ctx.out / "transmission.json";
    write_with_sidecar(file, nlohmann::json{{"entries", entries}}.dump(2) + "\n", c, "transmission",
                       details);
    curve.files.push_back(file);
  }
  return curve;
}

OracleReport run_oracle(const ScenarioConfig& c, const RunContext& ctx) {
  c.validate();
  OracleReport report;
  const SystemSpec sys = c.system();
  const GaussianWavepacket wp = c.wavepacket();
  try {
    const double t_f = resolve_t_f(c, wp);
    const GridWavefunction psi = oracle_state(c, wp, t_f);
    SplitOperatorPropagator prop(psi.grid, sys, c.oracle.dt);
    report.result.t_f = t_f;
    report.result.norm = psi.norm();
    report.result.flux = probability_flux(prop, psi.psi, 0.0);
    report.result.transmission = transmission_probability(psi.grid.points(), psi.psi);
    const nlohmann::json details = {{"t_f", t_f},
                                    {"transmission", report.result.transmission},
                                    {"flux", report.result.flux},
                                    {"norm", report.result.norm}};
    if (c.wants_format("csv")) {
      const auto file = ctx.out / "oracle.csv";
      write_with_sidecar(file, grid_csv(psi.grid.points(), psi.psi), c, "oracle", details);
      report.files.push_back(file);
    }
    if (c.wants_format("json")) {
      const auto file = ctx.out / "oracle.json";
      write_with_sidecar(file, details.dump(2) + "\n", c, "oracle");
      report.files.push_back(file);
    }
    note(ctx, "oracle: T = " + format_double(report.result.transmission) + " at t = " +
                  format_double(t_f));
  } catch (const Error& e) {
    report.failures.push_back({"oracle", describe(e)});
    note(ctx, "oracle failed: " + describe(e));
  }
  return report;
}

int run_selftest(std::ostream& os) {
  int failed = 0;
  auto check = [&](const std::string& name, bool ok, const std::string& detail) {
    os << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    failed += ok ? 0 : 1;
  };
  auto guarded = [&](const std::string& name, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      check(name, false, e.what());
    }
  };

  guarded("free-reconstruction", [&] {
    ScenarioConfig c = preset("free");
    const auto wp = c.wavepacket();
    const SystemSpec sys = c.system();
    const double t_f = *c.run.t_f;
    const Window w = resolve_window(c.run.windows.front(), wp, sys, t_f, 50, 0.0);
    const ManifoldRun run = march_window(make_problem(c, wp, 1, t_f), c.run.manifold, w);
    const auto psi = reconstruct_run(run, c.oracle.grid, sys, c.run.manifold, t_f);
    double worst = 0.0;
    for (std::size_t i = 0; i < psi.grid.size(); ++i)
      worst = std::max(worst, std::abs(psi.psi[i] - analytic_free_gaussian(wp, sys, psi.grid[i], t_f)));
    check("free-reconstruction", worst <= 1e-6, "max |dpsi| = " + format_double(worst));
  });

  guarded("split-operator-norm", [&] {
    ScenarioConfig c = preset("fig2b");
    const SystemSpec sys = c.system();
    GridWavefunction psi = sample_wavepacket(c.wavepacket(), c.oracle.grid, sys.hbar());
    const double n0 = psi.norm();
    psi = split_operator_propagate(psi, sys, 1e-4, 1000);
    const double drift = std::abs(psi.norm() - n0);
    check("split-operator-norm", drift <= 1e-10, "drift over 1000 steps = " + format_double(drift));
  });

  guarded("g-tilde", [&] {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Complex> v(9);
      for (auto& z : v) z = Complex(u(rng), u(rng));
      // g~_n = d^n (v v_x)/dx^n - v v^(n+1), with v v_x built as a series.
      Jet field(8), slope(8);
      double fact = 1.0;
      for (std::size_t k = 0; k <= 8; ++k) {
        if (k > 0) fact *= static_cast<double>(k);
        field[k] = v[k] / fact;
      }
      for (std::size_t k = 0; k < 8; ++k) slope[k] = field[k + 1] * static_cast<double>(k + 1);
      const Jet product = field * slope;
      for (int n = 1; n <= 8; ++n) {
        const Complex ahead = n + 1 <= 8 ? v[n + 1] : Complex{};
        const Complex series = product.derivative(static_cast<std::size_t>(n)) - v[0] * ahead;
        worst = std::max(worst, std::abs(series - g_tilde(v, n)) / (1.0 + std::abs(series)));
      }
    }
    check("g-tilde", worst <= 1e-12, "max difference = " + format_double(worst));
  });

  guarded("potential-jet", [&] {
    const auto v = PotentialModel::eckart(40.0, 4.32);
    const Complex x(0.37, 0.11);
    const double h = 1e-6;
    const Complex fd = (v(x + h) - v(x - h)) / (2.0 * h);
    const Complex jet = potential_jet(v, x, 1)[1];
    const double rel = std::abs(fd - jet) / std::abs(jet);
    check("potential-jet", rel <= 1e-6, "relative difference = " + format_double(rel));
  });
  return failed;
}

}  // namespace bomca
