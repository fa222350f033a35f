#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <map>

#include "zenolab/continuum.hpp"
#include "zenolab/inversion.hpp"
#include "zenolab/measurement.hpp"

namespace zenolab::cli {

namespace {

// A handler reads and validates everything it needs, then returns the
// computation as a job; nothing numerical happens before every key has been
// checked.
using Job = std::function<Table()>;
using Handler = Job (*)(Reader&, const RunContext&);

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json complex_json(complex z) { return json::array({z.real(), z.imag()}); }

json optional_time(double t) { return std::isinf(t) ? json(nullptr) : json(t); }

Backend read_backend(Reader& r) {
  return r.text("backend", "openmp", {"serial", "openmp"}) == "serial" ? Backend::Serial : Backend::OpenMP;
}

std::vector<double> read_times(Reader& r, const std::string& key) {
  std::vector<double> t = read_grid(r, key);
  if (t.front() < 0.0) fail(r.field(key), "times must be >= 0");
  return t;
}

Job cmd_survival(Reader& r, const RunContext& ctx) {
  const OperatorMatrix h = read_hamiltonian(r, "hamiltonian", ctx.seed);
  const StateVector psi = read_state(r, "state", h.dim(), ctx.seed);
  const std::vector<double> times = read_grid(r, "times", {0.0});
  return [=] {
    Table t{"survival", {"t", "re_A", "im_A", "p"}, {}, {}};
    for (double x : times) {
      const complex a = survival_amplitude(h, psi, x);
      t.rows.push_back({x, a.real(), a.imag(), std::norm(a)});
    }
    const MomentReport m = moments(h, psi);
    t.metadata["dim"] = h.dim();
    t.metadata["hermitian"] = h.hermitian();
    t.metadata["mean_energy"] = complex_json(m.mean);
    t.metadata["variance"] = complex_json(m.variance);
    t.metadata["zeno_time"] = optional_time(m.zeno_time);
    return t;
  };
}

Job cmd_pulsed(Reader& r, const RunContext& ctx) {
  OperatorMatrix h = sigma1();
  if (r.has("hamiltonian"))
    h = read_hamiltonian(r, "hamiltonian", ctx.seed);
  else
    r.record("hamiltonian", json{{"rabi", {{"omega", 1.0}}}});
  if (!h.hermitian()) fail(r.field("hamiltonian"), "pulsed measurement needs a hermitian Hamiltonian");
  const StateVector psi = read_state(r, "state", h.dim(), ctx.seed);

  if (r.has("tau")) {
    const double tau = r.positive("tau");
    const std::vector<double> times = read_times(r, "times");
    return [=] {
      Table t{"pulsed", {"t", "p_free", "p_pulsed"}, {}, {}};
      for (double x : times) t.rows.push_back({x, survival_probability(h, psi, x), pulsed_trajectory(h, psi, tau, x)});
      t.metadata["zeno_time"] = optional_time(moments(h, psi).zeno_time);
      return t;
    };
  }
  const double total = r.positive("t", 1.0);
  const std::vector<long> pulses = r.integers("pulses");
  if (pulses.empty()) fail(r.field("pulses"), "list of pulse counts is empty");
  for (long n : pulses)
    if (n < 1) fail(r.field("pulses"), "pulse counts must be >= 1");
  return [=] {
    Table t{"pulsed", {"N", "tau", "p", "gamma_eff", "gamma_ref"}, {}, {}};
    for (const PulsedPoint& pt : pulsed_survival_series(h, psi, total, pulses)) {
      const double tau = total / static_cast<double>(pt.pulses);
      const double gamma = pt.probability > kSurvivalZero ? effective_rate_pulsed(h, psi, tau).gamma_eff : kNaN;
      t.rows.push_back({static_cast<double>(pt.pulses), tau, pt.probability, gamma,
                        effective_rate_pulsed_reference(h, psi, tau)});
    }
    t.metadata["zeno_time"] = optional_time(moments(h, psi).zeno_time);
    return t;
  };
}

Job cmd_continuous(Reader& r, const RunContext&) {
  const double omega = r.positive("omega", 1.0);
  if (r.has("v") == r.has("gamma")) fail(r.field("v"), "give exactly one of 'v' or 'gamma'");
  const double v = r.has("v") ? r.non_negative("v", 0.0) : r.non_negative("gamma", 0.0) / 4.0;
  const std::vector<double> times = read_times(r, "times");
  return [=] {
    const TwoLevelAbsorptive sys(omega, v);
    Table t{"continuous", {"t", "re_A", "im_A", "p"}, {}, {}};
    for (double x : times) {
      const complex a = absorptive_amplitude(sys, x);
      t.rows.push_back({x, a.real(), a.imag(), std::norm(a)});
    }
    t.metadata["v"] = v;
    if (v > omega) {
      const ContinuousRate rate = effective_rate_continuous(sys);
      t.metadata["rate_asymptotic"] = rate.asymptotic;
      t.metadata["rate_exact"] = rate.exact;
      if (rate.warning) t.metadata["warning"] = *rate.warning;
    } else {
      t.metadata["note"] = "V <= Omega: oscillatory regime, no single effective rate";
    }
    return t;
  };
}

Job cmd_fieldsim(Reader& r, const RunContext&) {
  const double omega = r.positive("omega", 1.0);
  const double gamma = r.non_negative("gamma", 8.0);
  const double half_width = r.positive("W", 50.0);
  const long modes = r.integer("n", 2048);
  const double dt = r.positive("dt", 2e-3);
  const double total = r.positive("T", 5.0);
  const long stride = r.integer("stride", 1);
  if (stride < 1) fail(r.field("stride"), "must be >= 1");
  const Backend backend = read_backend(r);
  const bool compare = r.boolean("compare_reduced", true);
  const bool memory = r.boolean("memory_check", false);
  const FieldModel model(omega, gamma, half_width, modes, dt);
  if (dt * std::max({half_width, omega, gamma}) > kFieldResolutionLimit)
    fail(r.field("dt"), "resolution guard: dt*max(W, Omega, Gamma) must be <= " + std::to_string(kFieldResolutionLimit));

  return [=] {
    FieldRunOptions opts;
    opts.total_time = total;
    opts.backend = backend;
    if (memory) opts.snapshot_times = {total};
    const FieldSeries s = simulate_field(model, opts);

    Table t{"fieldsim", {"t", "re_x", "im_x", "re_y", "im_y", "norm2"}, {}, {}};
    double sup_x = 0.0;
    double sup_y = 0.0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      if (compare) {
        const auto [x, y] = reduced_dynamics(omega, gamma, s.t[i]);
        sup_x = std::max(sup_x, std::abs(s.x[i] - x));
        sup_y = std::max(sup_y, std::abs(s.y[i] - y));
      }
      if (i % static_cast<std::size_t>(stride) == 0 || i + 1 == s.t.size())
        t.rows.push_back({s.t[i], s.x[i].real(), s.x[i].imag(), s.y[i].real(), s.y[i].imag(), s.norm2[i]});
    }
    t.metadata["dt_used"] = s.dt;
    t.metadata["steps"] = s.t.size() - 1;
    t.metadata["mode_spacing"] = model.spacing();
    if (compare) {
      t.metadata["sup_error_x"] = sup_x;
      t.metadata["sup_error_y"] = sup_y;
    }
    if (memory) {
      const MemoryKernelReport mk = memory_kernel_check(model, s, backend);
      t.metadata["memory_check"] = {{"max_abs_residual", mk.max_abs_residual},
                                    {"max_abs_z", mk.max_abs_z},
                                    {"worst_frequency", mk.worst_frequency}};
    }
    return t;
  };
}

Job cmd_selfenergy(Reader& r, const RunContext&) {
  const FormFactor ff = read_form_factor(r, "form_factor");
  const std::string mode = r.text("mode", "points", {"points", "boundary"});
  if (mode == "boundary") {
    const std::vector<double> xs = read_grid(r, "x");
    for (double x : xs)
      if (!ff.inside(x) || x == ff.support_min() || x == ff.support_max())
        fail(r.field("x"), "boundary values need points strictly inside the support");
    return [=] {
      Table t{"selfenergy", {"x", "re_sigma_plus", "im_sigma_plus", "re_sigma_minus", "im_sigma_minus"}, {}, {}};
      for (double x : xs) {
        const auto [plus, minus] = boundary_values(ff, x);
        t.rows.push_back({x, plus.real(), plus.imag(), minus.real(), minus.imag()});
      }
      return t;
    };
  }
  const std::string sheet_name = r.text("sheet", "first", {"first", "second"});
  const Sheet sheet = sheet_name == "second" ? Sheet::Second : Sheet::First;
  const json& pts = r.raw("points");
  if (!pts.is_array() || pts.empty()) fail(r.field("points"), "expected a non-empty array of [re, im] points");
  std::vector<complex> es;
  json echo = json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    es.push_back(read_complex(pts[i], r.field("points") + "[" + std::to_string(i) + "]"));
    echo.push_back(complex_json(es.back()));
  }
  r.record("points", echo);
  return [=] {
    Table t{"selfenergy", {"re_E", "im_E", "re_sigma", "im_sigma"}, {}, {}};
    for (complex e : es) {
      const SelfEnergyValue v = self_energy(ff, e, sheet);
      t.rows.push_back({e.real(), e.imag(), v.value.real(), v.value.imag()});
    }
    t.metadata["sheet"] = sheet_name;
    return t;
  };
}

json pole_json(const PoleSolution& p) {
  return {{"e_pole", complex_json(p.e_pole)},
          {"omega0", p.omega0},
          {"delta_omega0", p.delta_omega0},
          {"gamma", p.gamma},
          {"z", p.z},
          {"sigma_derivative", complex_json(p.sigma_derivative)},
          {"residual", p.residual},
          {"iterations", p.iterations},
          {"method", p.method},
          {"form_factor", form_factor_json(p.form_factor)}};
}

Job cmd_pole(Reader& r, const RunContext&) {
  const FormFactor ff = read_form_factor(r, "form_factor");
  const double omega0 = r.number("omega0");
  PoleOptions opts;
  opts.damping = r.positive("damping", opts.damping);
  opts.max_iterations = static_cast<int>(r.integer("max_iterations", opts.max_iterations));
  if (opts.damping > 1.0) fail(r.field("damping"), "must be in (0, 1]");
  if (opts.max_iterations < 1) fail(r.field("max_iterations"), "must be >= 1");
  return [=] {
    const PoleSolution p = find_pole(ff, omega0, opts);
    const GoldenRule gr = golden_rule(ff, omega0);
    Table t{"pole", {"re_E", "im_E", "gamma", "z", "delta_omega0", "gamma_golden_rule"}, {}, {}};
    t.rows.push_back({p.e_pole.real(), p.e_pole.imag(), p.gamma, p.z, p.delta_omega0, gr.gamma});
    t.metadata["pole"] = pole_json(p);
    t.metadata["golden_rule"] = {{"gamma", gr.gamma}};
    if (gr.notice) t.metadata["golden_rule"]["notice"] = *gr.notice;
    if (auto w = first_sheet_warning(ff, omega0)) t.metadata["first_sheet_warning"] = *w;
    return t;
  };
}

struct InversionInput {
  FormFactor ff = FormFactor::constant_line(0.0);
  double omega0 = 0.0;
  std::vector<double> times;
  InversionOptions opts;
  bool decompose = true;
};

InversionInput read_inversion(Reader& r, bool force_decompose) {
  InversionInput in;
  in.ff = read_form_factor(r, "form_factor");
  in.omega0 = r.number("omega0");
  in.times = read_times(r, "times");
  in.opts.nodes_per_panel = static_cast<int>(r.integer("nodes_per_panel", in.opts.nodes_per_panel));
  if (in.opts.nodes_per_panel < 2 || in.opts.nodes_per_panel > 64) fail(r.field("nodes_per_panel"), "must be in [2, 64]");
  in.opts.backend = read_backend(r);
  in.decompose = force_decompose || r.boolean("decompose", true);
  return in;
}

SurvivalSeries run_inversion(const InversionInput& in, Table& t) {
  const SpectralDensity sd = spectral_density(in.ff, in.omega0);
  SurvivalSeries series;
  if (in.decompose) {
    const PoleSolution pole = find_pole(in.ff, in.omega0);
    series = decompose(sd, pole, in.times, in.opts);
    t.metadata["pole"] = pole_json(pole);
  } else {
    series = survival_from_spectrum(sd, in.times, in.opts);
  }
  t.metadata["normalization"] = sd.normalization();
  if (sd.warning()) t.metadata["warning"] = *sd.warning();
  t.columns = {"t", "re_A", "im_A", "p", "re_pole", "im_pole", "re_cut", "im_cut"};
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const complex a = series.amplitude[i];
    const complex pp = series.pole_part ? (*series.pole_part)[i] : complex(kNaN, kNaN);
    const complex cp = series.cut_part ? (*series.cut_part)[i] : complex(kNaN, kNaN);
    t.rows.push_back(
        {series.times[i], a.real(), a.imag(), series.probability[i], pp.real(), pp.imag(), cp.real(), cp.imag()});
  }
  return series;
}

Job cmd_invert(Reader& r, const RunContext&) {
  const InversionInput in = read_inversion(r, false);
  return [=] {
    Table t;
    run_inversion(in, t);
    return t;
  };
}

json window_json(const FitWindow& w) {
  return {{"t_begin", w.t_begin}, {"t_end", w.t_end}, {"points", w.points}, {"rms_residual", w.rms_residual}};
}

Job cmd_regimes(Reader& r, const RunContext&) {
  RegimeOptions ro;
  ro.zeno_fraction = r.positive("zeno_fraction", ro.zeno_fraction);
  ro.dominance_ratio = r.positive("dominance_ratio", ro.dominance_ratio);
  const long bins = r.integer("tail_bins", static_cast<long>(ro.tail_bins));
  if (bins < 2) fail(r.field("tail_bins"), "must be >= 2");
  ro.tail_bins = static_cast<std::size_t>(bins);
  const InversionInput in = read_inversion(r, true);
  return [=] {
    Table t;
    const SurvivalSeries series = run_inversion(in, t);
    const RegimeFit fit = fit_regimes(series, ro);
    t.metadata["fit"] = {{"zeno_coefficient", fit.zeno_coefficient},
                         {"zeno_time", fit.zeno_time},
                         {"exp_rate", fit.exp_rate},
                         {"z_fit", fit.z_fit},
                         {"power_exponent", fit.power_exponent},
                         {"t_zeno_end", fit.t_zeno_end},
                         {"t_power_start", fit.t_power_start},
                         {"zeno_window", window_json(fit.zeno_window)},
                         {"exp_window", window_json(fit.exp_window)},
                         {"power_window", window_json(fit.power_window)}};
    return t;
  };
}

json::json_pointer dotted_pointer(const std::string& path, const std::string& field) {
  std::string pointer;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = path.find('.', start);
    const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) fail(field, "malformed dotted path '" + path + "'");
    pointer += "/" + part;
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return json::json_pointer(pointer);
}

Job prepare(const std::string& name, Reader& r, const RunContext& ctx);

Job cmd_sweep(Reader& r, const RunContext& ctx) {
  const std::string base =
      r.text("base", "", {"survival", "pulsed", "continuous", "fieldsim", "selfenergy", "pole", "invert", "regimes"});
  const std::string parameter = r.text("parameter", "", {});
  if (parameter.empty()) fail(r.field("parameter"), "must name a field of the base config");
  if (r.has("values") == r.has("range")) fail(r.field("values"), "give exactly one of 'values' or 'range'");
  const std::vector<double> values = r.has("values") ? r.numbers("values") : read_grid(r, "range");
  if (values.empty()) fail(r.field("values"), "sweep list is empty");
  const json& base_cfg = r.raw("config");
  if (!base_cfg.is_object()) fail(r.field("config"), "expected the base command's parameter object");
  const json::json_pointer ptr = dotted_pointer(parameter, r.field("parameter"));
  if (ptr.parent_pointer() != json::json_pointer() && !base_cfg.contains(ptr.parent_pointer()))
    fail(r.field("parameter"), "'" + parameter + "' is not inside an object of the base config");

  // Every point is validated up front, so a bad value is a config error
  // before any point runs.
  const std::size_t n = values.size();
  std::vector<Job> jobs;
  json resolved_points = json::array();
  RunContext inner = ctx;
  inner.workers = 1;
  for (std::size_t i = 0; i < n; ++i) {
    json cfg = base_cfg;
    cfg[ptr] = values[i];
    json resolved;
    Reader pr(cfg, r.field("config") + "#" + std::to_string(i), resolved);
    jobs.push_back(prepare(base, pr, inner));
    pr.finish();
    resolved_points.push_back(resolved);
  }
  r.record("config", resolved_points[0]);

  const int workers = ctx.workers;
  return [=] {
    std::vector<Table> out(n);
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (std::size_t i = 0; i < n; ++i) {
      try {
        out[i] = jobs[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);

    Table t{"sweep", {"index", "value"}, {}, {}};
    t.columns.insert(t.columns.end(), out[0].columns.begin(), out[0].columns.end());
    json points = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& row : out[i].rows) {
        std::vector<double> full{static_cast<double>(i), values[i]};
        full.insert(full.end(), row.begin(), row.end());
        t.rows.push_back(std::move(full));
      }
      points.push_back({{"index", i}, {"value", values[i]}, {"metadata", out[i].metadata}});
    }
    t.metadata["base"] = base;
    t.metadata["parameter"] = parameter;
    t.metadata["points"] = points;
    return t;
  };
}

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> m{
      {"survival", cmd_survival}, {"pulsed", cmd_pulsed}, {"continuous", cmd_continuous},
      {"fieldsim", cmd_fieldsim}, {"selfenergy", cmd_selfenergy}, {"pole", cmd_pole},
      {"invert", cmd_invert},     {"regimes", cmd_regimes},      {"sweep", cmd_sweep}};
  return m;
}

Job prepare(const std::string& name, Reader& r, const RunContext& ctx) {
  const auto it = handlers().find(name);
  if (it == handlers().end()) throw ConfigError("unknown command '" + name + "'");
  try {
    return it->second(r, ctx);
  } catch (const Error& e) {
    // Module preconditions hit while validating input are configuration errors.
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"survival", "pulsed", "continuous", "fieldsim", "selfenergy",
                                              "pole",     "invert", "regimes",    "sweep"};
  return names;
}

Table run_command(const std::string& name, Reader& r, const RunContext& ctx) {
  Job job = prepare(name, r, ctx);
  r.finish();
  Table t = job();
  t.command = name;
  return t;
}

}  // namespace zenolab::cli
