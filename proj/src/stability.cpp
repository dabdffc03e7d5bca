#include "autoreson/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "autoreson/parallel.hpp"

namespace autoreson {

namespace {

void check_span(double tau0, double tau1) {
  if (!(tau0 >= 1e2) || !(tau1 <= 1e6) || !(tau1 > tau0))
    throw std::invalid_argument(
        "perturbation span must satisfy 1e2 <= tau0 < tau1 <= 1e6");
}

TrajectoryRecord<Vec2> run_polar(const Vec2& ic, const ForcingLaw& law,
                                 double tau0, double tau1,
                                 const IntegratorConfig& cfg) {
  IntegratorConfig c = cfg;
  c.dense = true;
  c.store = false;
  return integrate(polar_field(law, PolarConvention::Paper), ic, tau0, tau1, c);
}

// Difference of the two records on a grid that resolves the local
// perturbation oscillation (frequency sqrt(2 F tau^{-A})).
PerturbationTrace subtract_records(const TrajectoryRecord<Vec2>& ref,
                                   const TrajectoryRecord<Vec2>& pert,
                                   const AsymptoticProfile& profile,
                                   double tau0, double tau1) {
  PerturbationTrace trace;
  trace.status = Status::Ok;
  for (const auto* rec : {&ref, &pert})
    if (!rec->ok()) trace.status = rec->status;

  if (ref.dense.empty() || pert.dense.empty()) {
    trace.escaped = true;
    trace.escape_tau = tau0;
    return trace;
  }

  const double tau_end = std::min({tau1, ref.last_time, pert.last_time});
  const double dt_floor = (tau1 - tau0) / 200000.0;

  double tau = tau0;
  for (;;) {
    const Vec2 a = pert.eval(tau);
    const Vec2 b = ref.eval(tau);
    const Vec2 d = a - b;
    trace.taus.push_back(tau);
    trace.pq.push_back(d);
    if (std::abs(d[0]) > 0.5 || std::abs(d[1]) > 1.0) {
      trace.escaped = true;
      trace.escape_tau = tau;
      return trace;
    }
    if (tau >= tau_end) break;
    const double omega =
        std::sqrt(2.0 * profile.law.F * std::pow(tau, -profile.A));
    const double dt =
        std::max(dt_floor, 2.0 * std::numbers::pi / (40.0 * omega));
    tau = std::min(tau + dt, tau_end);
  }

  // Both records healthy and the full span covered: a clean trace.  An early
  // stop of either integration without a threshold crossing still means the
  // locality of the perturbation description was lost.
  if (tau_end < tau1 * (1.0 - 1e-12)) {
    trace.escaped = true;
    trace.escape_tau = tau_end;
  }
  return trace;
}

struct RatioScan {
  double max_ratio = 1.0;
  double max_ratio_balanced = 1.0;
};

RatioScan scan_ratios(const PerturbationTrace& trace, double F, double A) {
  RatioScan out;
  if (trace.taus.empty()) return out;
  const PerturbationState s0{trace.pq.front()[0], trace.pq.front()[1],
                             trace.taus.front()};
  const double L0 = lyapunov_value(s0, F, A);
  const double B0 = lyapunov_value_balanced(s0, F, A);
  double maxL = 0.0, maxB = 0.0;
  for (std::size_t k = 0; k < trace.taus.size(); ++k) {
    const PerturbationState s{trace.pq[k][0], trace.pq[k][1], trace.taus[k]};
    maxL = std::max(maxL, lyapunov_value(s, F, A));
    maxB = std::max(maxB, lyapunov_value_balanced(s, F, A));
  }
  const double inf = std::numeric_limits<double>::infinity();
  out.max_ratio = L0 > 0.0 ? maxL / L0 : (maxL < 1e-20 ? 1.0 : inf);
  out.max_ratio_balanced = B0 > 0.0 ? maxB / B0 : (maxB < 1e-20 ? 1.0 : inf);
  return out;
}

} // namespace

double lyapunov_value(const PerturbationState& s, double F, double A) {
  if (!(s.tau > 0.0)) throw std::domain_error("lyapunov_value: tau must be positive");
  if (!(F > 0.0)) throw std::domain_error("lyapunov_value: F must be positive");
  return F * std::pow(s.tau, -A) * s.q * s.q + s.p * s.p;
}

double lyapunov_value_balanced(const PerturbationState& s, double F, double A) {
  if (!(s.tau > 0.0)) throw std::domain_error("lyapunov_value_balanced: tau must be positive");
  if (!(F > 0.0)) throw std::domain_error("lyapunov_value_balanced: F must be positive");
  return 0.5 * F * std::pow(s.tau, -A) * s.q * s.q + s.p * s.p;
}

PerturbationTrace perturbation_flow(const PerturbationState& start,
                                    const AsymptoticProfile& profile,
                                    double tau1, const IntegratorConfig& cfg) {
  if (!profile.admissible())
    throw std::invalid_argument("perturbation_flow: inadmissible profile");
  check_span(start.tau, tau1);

  const PolarState base = truncated_asymptote(profile, start.tau);
  const Vec2 ref_ic(base.rho, base.alpha);
  const Vec2 pert_ic(base.rho + start.p, base.alpha + start.q);

  const auto ref = run_polar(ref_ic, profile.law, start.tau, tau1, cfg);
  const auto pert = run_polar(pert_ic, profile.law, start.tau, tau1, cfg);
  return subtract_records(ref, pert, profile, start.tau, tau1);
}

std::vector<RatePoint> lyapunov_rate(const PerturbationTrace& trace, double F,
                                     double A) {
  const std::size_t m = trace.taus.size();
  if (m < 3)
    throw std::invalid_argument("lyapunov_rate: insufficient data (needs >= 3 samples)");
  std::vector<double> L(m);
  for (std::size_t k = 0; k < m; ++k) {
    const PerturbationState s{trace.pq[k][0], trace.pq[k][1], trace.taus[k]};
    L[k] = lyapunov_value(s, F, A);
  }
  std::vector<RatePoint> out;
  out.reserve(m - 2);
  for (std::size_t k = 1; k + 1 < m; ++k) {
    RatePoint r;
    r.tau = trace.taus[k];
    r.numeric = (L[k + 1] - L[k - 1]) / (trace.taus[k + 1] - trace.taus[k - 1]);
    r.model = -trace.pq[k][0] * trace.pq[k][0] / (4.0 * trace.taus[k]);
    out.push_back(r);
  }
  return out;
}

StabilityReport stability_experiment(int n, const ForcingLaw& law, double radius,
                                     int samples, double tau0, double tau1,
                                     std::uint64_t seed,
                                     const IntegratorConfig& cfg) {
  if (!(radius > 0.0) || radius > 0.1)
    throw std::invalid_argument("stability_experiment: radius must lie in (0, 0.1]");
  if (samples < 1)
    throw std::invalid_argument("stability_experiment: needs samples >= 1");
  check_span(tau0, tau1);
  const AsymptoticProfile profile = AsymptoticProfile::make(law, n);
  if (!profile.admissible())
    throw std::invalid_argument("stability_experiment: inadmissible lambda");

  // All random draws happen sequentially up front; workers only read them.
  std::mt19937_64 rng(seed);
  auto u53 = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1p-53;
  };
  std::vector<double> thetas(static_cast<std::size_t>(samples));
  for (auto& th : thetas) th = 2.0 * std::numbers::pi * u53();

  const double q_scale = std::sqrt(law.F * std::pow(tau0, -profile.A));
  const PolarState base = truncated_asymptote(profile, tau0);
  const auto ref =
      run_polar(Vec2(base.rho, base.alpha), law, tau0, tau1, cfg);

  StabilityReport report;
  report.n = n;
  report.samples = samples;
  report.tau0 = tau0;
  report.tau1 = tau1;
  report.radius = radius;
  report.seed = seed;
  report.per_sample.resize(static_cast<std::size_t>(samples));

  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
    const double p0 = radius * std::cos(thetas[i]);
    const double q0 = radius * std::sin(thetas[i]) / q_scale;
    const auto pert = run_polar(Vec2(base.rho + p0, base.alpha + q0), law,
                                tau0, tau1, cfg);
    const PerturbationTrace trace =
        subtract_records(ref, pert, profile, tau0, tau1);
    const RatioScan ratios = scan_ratios(trace, law.F, profile.A);
    SampleSummary& s = report.per_sample[i];
    s.index = static_cast<int>(i);
    s.p0 = p0;
    s.q0 = q0;
    s.max_ratio = ratios.max_ratio;
    s.max_ratio_balanced = ratios.max_ratio_balanced;
    s.escaped = trace.escaped;
    s.escape_tau = trace.escape_tau;
  });

  report.max_L_ratio = 0.0;
  report.max_L_ratio_balanced = 0.0;
  report.escaped = 0;
  for (const auto& s : report.per_sample) {
    report.max_L_ratio = std::max(report.max_L_ratio, s.max_ratio);
    report.max_L_ratio_balanced =
        std::max(report.max_L_ratio_balanced, s.max_ratio_balanced);
    if (s.escaped) ++report.escaped;
  }
  return report;
}

} // namespace autoreson
