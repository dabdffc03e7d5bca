#pragma once

#include <cstdint>
#include <vector>

#include "autoreson/asymptotics.hpp"
#include "autoreson/integrator.hpp"
#include "autoreson/models.hpp"

namespace autoreson {

// Perturbation around the synchronized solution: rho = rho* + p, alpha = alpha* + q.
struct PerturbationState {
  double p = 0.0;
  double q = 0.0;
  double tau = 1.0;
};

// Quadratic stability certificate L = F tau^{-A} q^2 + p^2.
double lyapunov_value(const PerturbationState& s, double F, double A);

// Companion weighting L~ = (F/2) tau^{-A} q^2 + p^2, whose flow derivative has
// no oscillatory cross term; reported alongside L as a diagnostic.
double lyapunov_value_balanced(const PerturbationState& s, double F, double A);

struct PerturbationTrace {
  std::vector<double> taus;
  std::vector<Vec2> pq;     // (p, q) samples
  bool escaped = false;     // left |p| <= 0.5, |q| <= 1, or the flow broke down
  double escape_tau = 0.0;  // meaningful when escaped
  Status status = Status::Ok; // worst status of the two underlying integrations
};

// Perturbation dynamics by trajectory subtraction: the full polar flow is
// integrated from (rho* + p0, alpha* + q0) and from (rho*, alpha*) with
// identical settings, and (p, q)(tau) is their difference sampled on an
// oscillation-resolving grid.  Escape is recorded on the trace, not thrown,
// so batch experiments can count it.
PerturbationTrace perturbation_flow(const PerturbationState& start,
                                    const AsymptoticProfile& profile,
                                    double tau1, const IntegratorConfig& cfg);

struct RatePoint {
  double tau = 0.0;
  double numeric = 0.0; // central-difference dL/dtau from the trace
  double model = 0.0;   // predicted leading rate -p^2 / (4 tau)
};

std::vector<RatePoint> lyapunov_rate(const PerturbationTrace& trace, double F,
                                     double A);

struct SampleSummary {
  int index = 0;
  double p0 = 0.0;
  double q0 = 0.0;
  double max_ratio = 0.0;          // max over tau of L(tau) / L(tau0)
  double max_ratio_balanced = 0.0; // same for the balanced weighting
  bool escaped = false;
  double escape_tau = 0.0;
};

struct StabilityReport {
  int n = 1;
  int samples = 0;
  double tau0 = 0.0;
  double tau1 = 0.0;
  double radius = 0.0;
  std::uint64_t seed = 0;
  double max_L_ratio = 0.0;
  double max_L_ratio_balanced = 0.0;
  int escaped = 0;
  std::vector<SampleSummary> per_sample;
};

// Draws `samples` initial perturbations uniformly (in the elliptic angle) on
// the level set L = radius^2 at tau0, integrates each by subtraction against
// one shared reference trajectory, and reports growth ratios and escapes.
// Deterministic given (seed, cfg) regardless of worker count.
StabilityReport stability_experiment(int n, const ForcingLaw& law, double radius,
                                     int samples, double tau0, double tau1,
                                     std::uint64_t seed,
                                     const IntegratorConfig& cfg);

} // namespace autoreson
