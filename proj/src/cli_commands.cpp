#include "autoreson/cli_commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "autoreson/asymptotics.hpp"
#include "autoreson/capture.hpp"
#include "autoreson/csv.hpp"
#include "autoreson/integrator.hpp"
#include "autoreson/manifest.hpp"
#include "autoreson/models.hpp"
#include "autoreson/stability.hpp"
#include "autoreson/version.hpp"

namespace autoreson {

namespace {

std::string sanitize_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

// Streams CSV rows to the output file as they are produced (so partial
// results survive a failed run) while keeping a copy for the checksum.
struct RunContext {
  std::string command;
  const Config* cfg = nullptr;
  std::string out_path;
  std::string started;
  std::ofstream file;
  std::ostringstream copy;
  std::string status = "ok";
  std::string error;
  std::vector<std::pair<std::string, std::string>> extras;

  void row(const std::vector<std::string>& cells) {
    csv_write_row(file, cells);
    csv_write_row(copy, cells);
  }

  void fail(const std::string& status_name_, const std::string& message) {
    status = status_name_;
    error = sanitize_line(message);
  }
};

RunContext open_context(const std::string& command, const Config& cfg) {
  RunContext ctx;
  ctx.command = command;
  ctx.cfg = &cfg;
  ctx.out_path = cfg.get_string("out", command + ".csv");
  ctx.started = utc_timestamp();
  ctx.file.open(ctx.out_path, std::ios::binary | std::ios::trunc);
  if (!ctx.file)
    throw ConfigError("out: cannot open '" + ctx.out_path + "' for writing");
  return ctx;
}

int finish(RunContext& ctx) {
  ctx.file.flush();
  const bool file_ok = static_cast<bool>(ctx.file);
  ctx.file.close();
  if (!file_ok && ctx.status == "ok")
    ctx.fail("io_error", "short write to '" + ctx.out_path + "'");

  Manifest m;
  m.add("tool", kToolName);
  m.add("version", kVersion);
  m.add("command", ctx.command);
  m.add("seed", std::to_string(ctx.cfg->get_seed("seed", 0)));
  m.add("started_utc", ctx.started);
  m.add("finished_utc", utc_timestamp());
  m.add("status", ctx.status);
  if (!ctx.error.empty()) m.add("error", ctx.error);
  for (const auto& [key, value] : ctx.cfg->entries())
    m.add("config." + key, value);
  for (const auto& [key, value] : ctx.extras) m.add(key, value);
  m.add_output(ctx.out_path, ctx.copy.str());
  m.write_atomic(ctx.out_path + ".manifest");
  return ctx.status == "ok" ? 0 : 3;
}

ForcingLaw law_from(const Config& cfg) {
  const double lambda = cfg.get_double("law.lambda", 0.0);
  if (cfg.has("law.F") && cfg.has("law.f1"))
    throw ConfigError("law.F and law.f1 are both set; give only one");
  double F = cfg.get_double("law.F", 1.0);
  if (cfg.has("law.f1")) F = f1_to_F(cfg.get_double("law.f1", 0.0), lambda);
  return ForcingLaw{F, lambda};
}

IntegratorConfig integ_from(const Config& cfg, double default_h_max) {
  IntegratorConfig ic;
  ic.rtol = cfg.get_double("integ.rtol", 1e-9);
  ic.atol = cfg.get_double("integ.atol", 1e-12);
  ic.h_max = cfg.has("integ.h_max") ? cfg.get_double("integ.h_max", 0.0)
                                    : default_h_max;
  ic.max_steps = cfg.get_int("integ.max_steps", 10'000'000);
  ic.dense = false;
  ic.store = false;
  if (!(ic.rtol > 0.0)) throw ConfigError("integ.rtol: must be positive");
  if (!(ic.atol > 0.0)) throw ConfigError("integ.atol: must be positive");
  if (ic.h_max < 0.0) throw ConfigError("integ.h_max: must be >= 0");
  if (ic.max_steps < 1) throw ConfigError("integ.max_steps: must be >= 1");
  return ic;
}

void require_increasing(const std::vector<double>& grid, const std::string& key) {
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1]))
      throw ConfigError(key + ": values must be strictly increasing");
  if (!grid.empty() && !(grid.front() > 0.0))
    throw ConfigError(key + ": values must be positive");
}

const std::set<std::string> kLawKeys = {"law.lambda", "law.F", "law.f1"};
const std::set<std::string> kIntegKeys = {"integ.rtol", "integ.atol",
                                          "integ.h_max", "integ.max_steps"};

std::set<std::string> allowed_keys(std::initializer_list<const char*> extra,
                                   bool with_law, bool with_integ) {
  std::set<std::string> keys = {"out", "seed"};
  if (with_law) keys.insert(kLawKeys.begin(), kLawKeys.end());
  if (with_integ) keys.insert(kIntegKeys.begin(), kIntegKeys.end());
  for (const char* k : extra) keys.insert(k);
  return keys;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int run_simulate(const Config& cfg) {
  cfg.require_known(allowed_keys(
      {"frame", "samples", "convention", "ic.kind", "ic.n", "ic.rho",
       "ic.alpha", "ic.re", "ic.im"},
      true, true));

  const std::string frame_str = cfg.get_string("frame", "slow");
  Frame frame;
  if (frame_str == "slow") frame = Frame::Slow;
  else if (frame_str == "original") frame = Frame::Original;
  else if (frame_str == "polar") frame = Frame::Polar;
  else throw ConfigError("frame: expected slow, original, or polar");

  const ForcingLaw law = law_from(cfg);
  const std::string conv_str = cfg.get_string("convention", "paper");
  PolarConvention conv;
  if (conv_str == "paper") conv = PolarConvention::Paper;
  else if (conv_str == "pushforward") conv = PolarConvention::Pushforward;
  else throw ConfigError("convention: expected paper or pushforward");

  const double default_h_max = frame == Frame::Polar ? 0.0 : 0.2;
  const IntegratorConfig integ = integ_from(cfg, default_h_max);

  const std::vector<double> samples = cfg.get_grid("samples", "log:1e2:1e4:200");
  require_increasing(samples, "samples");

  const std::string kind = cfg.get_string("ic.kind", "asymptote");
  if (kind != "asymptote" && kind != "explicit" && kind != "complex")
    throw ConfigError("ic.kind: expected asymptote, explicit, or complex");
  if (kind == "complex" && frame == Frame::Polar)
    throw ConfigError("ic.kind: complex start applies to slow or original frames");

  // Initial state at the first sample time (validated before any output).
  Complex psi0;       // slow-frame value at tau0
  PolarState polar0;  // used directly in the polar frame
  if (!samples.empty()) {
    const double x0 = samples.front();
    const double tau0 = frame == Frame::Original ? 0.5 * x0 * x0 : x0;
    if (kind == "asymptote") {
      const int n = static_cast<int>(cfg.get_int("ic.n", 1));
      if (n != 0 && n != 1) throw ConfigError("ic.n: must be 0 or 1");
      if (!(law.F > 0.0))
        throw ConfigError("law.F: must be positive for an asymptote start");
      polar0 = truncated_asymptote(AsymptoticProfile::make(law, n), tau0);
      psi0 = complex_from_polar(polar0);
    } else if (kind == "explicit") {
      polar0 = PolarState{cfg.get_double("ic.rho", 0.0),
                          cfg.get_double("ic.alpha", 0.0), tau0};
      if (1.0 + polar0.rho < 0.0) throw ConfigError("ic.rho: must be >= -1");
      psi0 = complex_from_polar(polar0);
    } else {
      const Complex raw(cfg.get_double("ic.re", 1.0), cfg.get_double("ic.im", 0.0));
      psi0 = frame == Frame::Original
                 ? to_slow(ComplexState{raw, x0, Frame::Original}).value
                 : raw;
      polar0 = polar_from_complex(psi0, tau0);
    }
  }

  RunContext ctx = open_context("simulate", cfg);
  ctx.row({frame == Frame::Original ? "t" : "tau", "re_psi", "im_psi",
           "abs_psi", "rho", "alpha"});
  if (samples.empty()) return finish(ctx);

  // March from sample to sample, emitting one row per sample.
  const double tau_first =
      frame == Frame::Original ? 0.5 * samples.front() * samples.front()
                               : samples.front();
  double alpha_hint = polar0.alpha;
  Vec2 y;
  std::function<Vec2(double, const Vec2&)> field;
  if (frame == Frame::Slow) {
    y = vec2(psi0);
    field = slow_field(law);
  } else if (frame == Frame::Original) {
    y = vec2(from_slow(ComplexState{psi0, tau_first, Frame::Slow}).value);
    field = original_field(law);
  } else {
    y = Vec2(polar0.rho, polar0.alpha);
    field = polar_field(law, conv);
  }

  auto emit = [&](double x, const Vec2& state) {
    double tau, re, im, abs_v, rho, alpha;
    if (frame == Frame::Polar) {
      tau = x;
      rho = state[0];
      alpha = state[1];
      const Complex psi = complex_from_polar(PolarState{rho, alpha, tau});
      re = psi.real();
      im = psi.imag();
      abs_v = 1.0 + rho;
    } else {
      const Complex value = cplx(state);
      if (frame == Frame::Original) {
        tau = 0.5 * x * x;
        const PolarState p =
            polar_from_complex(value / std::sqrt(x), 0.0, alpha_hint);
        re = value.real();
        im = value.imag();
        abs_v = std::abs(value);
        rho = p.rho;
        alpha = p.alpha;
      } else {
        tau = x;
        const PolarState p = polar_from_complex(value, tau, alpha_hint);
        re = value.real();
        im = value.imag();
        abs_v = std::abs(value);
        rho = p.rho;
        alpha = p.alpha;
      }
      alpha_hint = alpha;
    }
    ctx.row({csv_number(frame == Frame::Original ? x : tau), csv_number(re),
             csv_number(im), csv_number(abs_v), csv_number(rho),
             csv_number(alpha)});
  };

  emit(samples.front(), y);
  for (std::size_t k = 1; k < samples.size(); ++k) {
    const auto rec = integrate(field, y, samples[k - 1], samples[k], integ);
    if (!rec.ok()) {
      ctx.fail(status_name(rec.status),
               "integration stopped at " + csv_number(rec.last_time) + ": " +
                   rec.error);
      break;
    }
    y = rec.last_state;
    emit(samples[k], y);
  }
  return finish(ctx);
}

// ---------------------------------------------------------------------------
// asymptote
// ---------------------------------------------------------------------------

int run_asymptote(const Config& cfg) {
  cfg.require_known(allowed_keys({"n", "taus"}, true, false));
  const ForcingLaw law = law_from(cfg);
  if (!(law.F > 0.0)) throw ConfigError("law.F: must be positive");
  const int n = static_cast<int>(cfg.get_int("n", 1));
  if (n != 0 && n != 1) throw ConfigError("n: must be 0 or 1");
  const std::vector<double> taus = cfg.get_grid("taus", "log:1e2:1e6:200");
  require_increasing(taus, "taus");

  const AsymptoticProfile profile = AsymptoticProfile::make(law, n);
  RunContext ctx = open_context("asymptote", cfg);
  ctx.row({"tau", "rho_star", "alpha_star", "res_rho", "res_alpha"});
  for (double tau : taus) {
    const PolarState s = truncated_asymptote(profile, tau);
    const ResidualPair res = residual_norm(profile, tau);
    ctx.row({csv_number(tau), csv_number(s.rho), csv_number(s.alpha),
             csv_number(res.res_rho), csv_number(res.res_alpha)});
  }
  return finish(ctx);
}

// ---------------------------------------------------------------------------
// stability
// ---------------------------------------------------------------------------

int run_stability(const Config& cfg) {
  cfg.require_known(
      allowed_keys({"n", "radius", "samples", "tau0", "tau1"}, true, true));
  const ForcingLaw law = law_from(cfg);
  const int n = static_cast<int>(cfg.get_int("n", 1));
  if (n != 0 && n != 1) throw ConfigError("n: must be 0 or 1");
  const double radius = cfg.get_double("radius", 1e-2);
  const int samples = static_cast<int>(cfg.get_int("samples", 100));
  const double tau0 = cfg.get_double("tau0", 1e3);
  const double tau1 = cfg.get_double("tau1", 1e5);
  const std::uint64_t seed = cfg.get_seed("seed", 0);
  const IntegratorConfig integ = integ_from(cfg, 0.0);

  StabilityReport report;
  try {
    report = stability_experiment(n, law, radius, samples, tau0, tau1, seed, integ);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  RunContext ctx = open_context("stability", cfg);
  ctx.row({"sample", "p0", "q0", "max_L_ratio", "escaped"});
  for (const auto& s : report.per_sample)
    ctx.row({std::to_string(s.index), csv_number(s.p0), csv_number(s.q0),
             csv_number(s.max_ratio), s.escaped ? "1" : "0"});
  ctx.extras = {
      {"result.max_L_ratio", csv_number(report.max_L_ratio)},
      {"result.max_L_ratio_balanced", csv_number(report.max_L_ratio_balanced)},
      {"result.escaped", std::to_string(report.escaped)},
  };
  return finish(ctx);
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

std::vector<ScanIC> parse_ics(const std::string& text) {
  std::vector<ScanIC> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ';')) {
    if (token.empty()) continue;
    std::stringstream ts(token);
    std::string head;
    std::getline(ts, head, ':');
    if (head == "asymptote") {
      std::string n_str;
      std::getline(ts, n_str, ':');
      ScanIC ic;
      ic.kind = ScanIC::Kind::Asymptote;
      ic.n = n_str.empty() ? 1 : std::stoi(n_str);
      if (ic.n != 0 && ic.n != 1)
        throw ConfigError("ics: asymptote parity must be 0 or 1");
      out.push_back(ic);
    } else if (head == "explicit") {
      std::string rho_str, alpha_str;
      if (!std::getline(ts, rho_str, ':') || !std::getline(ts, alpha_str, ':'))
        throw ConfigError("ics: explicit form is explicit:RHO:ALPHA");
      ScanIC ic;
      ic.kind = ScanIC::Kind::Explicit;
      try {
        ic.rho = std::stod(rho_str);
        ic.alpha = std::stod(alpha_str);
      } catch (const std::exception&) {
        throw ConfigError("ics: explicit values must be numbers");
      }
      out.push_back(ic);
    } else {
      throw ConfigError("ics: expected asymptote:N or explicit:RHO:ALPHA");
    }
  }
  if (out.empty()) throw ConfigError("ics: needs at least one initial condition");
  return out;
}

int run_scan(const Config& cfg) {
  cfg.require_known(allowed_keys(
      {"lambdas", "Fs", "ics", "tau0", "tau1", "classify.amp_lo",
       "classify.amp_hi", "classify.residence_min", "classify.decay_exponent",
       "classify.decay_tol"},
      false, true));
  const std::vector<double> lambdas = cfg.get_grid("lambdas", "0");
  const std::vector<double> Fs = cfg.get_grid("Fs", "1");
  const std::vector<ScanIC> ics = parse_ics(cfg.get_string("ics", "asymptote:1"));
  const double tau0 = cfg.get_double("tau0", 1e2);
  const double tau1 = cfg.get_double("tau1", 1e4);
  const std::uint64_t seed = cfg.get_seed("seed", 0);
  const IntegratorConfig integ = integ_from(cfg, 0.0);
  ClassifyConfig ccfg;
  ccfg.amp_lo = cfg.get_double("classify.amp_lo", ccfg.amp_lo);
  ccfg.amp_hi = cfg.get_double("classify.amp_hi", ccfg.amp_hi);
  ccfg.residence_min = cfg.get_double("classify.residence_min", ccfg.residence_min);
  ccfg.decay_exponent = cfg.get_double("classify.decay_exponent", ccfg.decay_exponent);
  ccfg.decay_tol = cfg.get_double("classify.decay_tol", ccfg.decay_tol);

  std::vector<ScanCell> cells;
  try {
    cells = capture_scan(lambdas, Fs, ics, tau0, tau1, integ, seed, ccfg);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  RunContext ctx = open_context("scan", cfg);
  ctx.row({"lambda", "F", "captured_fraction", "undecided_fraction", "n_samples"});
  for (const auto& c : cells)
    ctx.row({csv_number(c.lambda), csv_number(c.F),
             csv_number(c.captured_fraction), csv_number(c.undecided_fraction),
             std::to_string(c.n_samples)});
  return finish(ctx);
}

// ---------------------------------------------------------------------------
// pendulum
// ---------------------------------------------------------------------------

int run_pendulum(const Config& cfg) {
  cfg.require_known(allowed_keys(
      {"pendulum.Fp", "pendulum.D", "alphas", "alpha_dots"}, false, false));
  PendulumParams prm;
  prm.Fp = cfg.get_double("pendulum.Fp", 1.0);
  prm.D = cfg.get_double("pendulum.D", 0.0);
  if (!(prm.Fp > 0.0)) throw ConfigError("pendulum.Fp: must be positive");
  const std::vector<double> alphas =
      cfg.get_grid("alphas", "lin:0:6.283185307179586:25");
  const std::vector<double> alpha_dots = cfg.get_grid("alpha_dots", "lin:-3:3:25");

  RunContext ctx = open_context("pendulum", cfg);
  ctx.row({"alpha", "alpha_dot", "energy", "region"});
  for (double a : alphas)
    for (double ad : alpha_dots)
      ctx.row({csv_number(a), csv_number(ad),
               csv_number(pendulum_energy(a, ad, prm)),
               region_name(inside_separatrix(a, ad, prm))});
  return finish(ctx);
}

} // namespace

int run_command(const std::string& command, const Config& cfg) {
  try {
    if (command == "simulate") return run_simulate(cfg);
    if (command == "asymptote") return run_asymptote(cfg);
    if (command == "stability") return run_stability(cfg);
    if (command == "scan") return run_scan(cfg);
    if (command == "pendulum") return run_pendulum(cfg);
    std::cerr << "unknown command: " << command << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    // Module preconditions reached from the CLI are configuration problems.
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace autoreson
