#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "autoreson/asymptotics.hpp"
#include "autoreson/integrator.hpp"
#include "autoreson/models.hpp"

namespace autoreson {

// Stretched coordinates near the resonance threshold, parameterized by the
// sweep-rate parameter epsilon: delta = epsilon^{3/2 - 2 lambda} and constant
// torque drive = epsilon^{1 + 4 lambda}.
struct CaptureFrame {
  double epsilon = 0.1;
  double lambda = 0.0;
  double delta = 0.0;
  double drive = 0.0;
  bool valid = false; // delta < 0.2: the stretched description applies
};

CaptureFrame capture_frame(double epsilon, double lambda);

// Normalized capture flow:
//   d rho / ds   = (1 + delta D s)^{2 lambda} F sin(alpha)
//   d alpha / ds = 2 rho + D s
//                  + delta (rho^2 - (1 + delta D s)^{2 lambda} F sin(alpha) / (1 + delta rho))
// with D = frame.drive, evaluated verbatim.
Vec2 rhs_capture(double s, double rho, double alpha, const CaptureFrame& frame,
                 double F);

auto inline capture_field(const CaptureFrame& frame, double F) {
  return [frame, F](double s, const Vec2& y) {
    return rhs_capture(s, y[0], y[1], frame, F);
  };
}

// Driven-pendulum limit: alpha'' = Fp sin(alpha) + D.
struct PendulumParams {
  double Fp = 1.0;
  double D = 0.0;

  // From the capture parameters.  Eliminating rho from the delta -> 0 limit
  // of the capture flow gives sin-coefficient 2F; the printed reduced
  // equation carries F.  Both are available; the derivation-consistent 2F is
  // the default.
  static PendulumParams from_forcing(double F, double epsilon, double lambda,
                                     bool printed_coefficient = false);
};

Vec2 pendulum_rhs(double alpha, double alpha_dot, const PendulumParams& prm);

auto inline pendulum_field(const PendulumParams& prm) {
  return [prm](double, const Vec2& y) { return pendulum_rhs(y[0], y[1], prm); };
}

// First integral E = alpha_dot^2/2 + Fp cos(alpha) - D alpha, exactly
// conserved along pendulum_rhs.
double pendulum_energy(double alpha, double alpha_dot, const PendulumParams& prm);

enum class FixedPointKind { Center, Saddle, Degenerate };

struct FixedPoint {
  double alpha = 0.0; // in [0, 2 pi)
  FixedPointKind kind = FixedPointKind::Center;
};

// Equilibria Fp sin(alpha) + D = 0 in [0, 2 pi), sorted by alpha.  Empty when
// |D/Fp| > 1 (no capture region); a single Degenerate point when |D/Fp| = 1.
std::vector<FixedPoint> pendulum_fixed_points(const PendulumParams& prm);

enum class Region { Inside, Outside, Boundary };

inline const char* region_name(Region r) {
  switch (r) {
    case Region::Inside: return "inside";
    case Region::Outside: return "outside";
    case Region::Boundary: return "boundary";
  }
  return "?";
}

// Energy test against the separatrix loop around the center: alpha is reduced
// to the loop's 2 pi window anchored at the saddle and E is compared with the
// loop-forming saddle energy (tolerance 1e-9 -> Boundary).  States with no
// equilibria are always Outside.
Region inside_separatrix(double alpha, double alpha_dot, const PendulumParams& prm);

enum class OrbitClass { Librating, Rotating };

// Brute-force classification: integrate and watch the alpha range; reaching a
// full turn (2 pi) means Rotating, staying short of it through s_max means
// Librating.  nullopt when the integration fails first.
std::optional<OrbitClass> classify_pendulum_orbit(double alpha, double alpha_dot,
                                                  const PendulumParams& prm,
                                                  double s_max,
                                                  const IntegratorConfig& cfg);

std::optional<OrbitClass> classify_capture_orbit(double rho, double alpha,
                                                 const CaptureFrame& frame,
                                                 double F, double s_max,
                                                 const IntegratorConfig& cfg);

// Trajectory dichotomy thresholds (defaults overridable via config).
struct ClassifyConfig {
  double amp_lo = 0.8;          // captured band for mean (1 + rho)
  double amp_hi = 1.2;
  double residence_min = 0.9;   // captured phase-residence fraction near pi
  double decay_exponent = -0.5; // passing-trajectory |psi|^2 power law
  double decay_tol = 0.15;
};

enum class Verdict { Captured, NotCaptured, Undecided };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Captured: return "captured";
    case Verdict::NotCaptured: return "not_captured";
    case Verdict::Undecided: return "undecided";
  }
  return "?";
}

struct CaptureDiagnostics {
  double final_amplitude_ratio = 0.0; // mean |Psi|/sqrt(t) = 1 + rho, final decade
  double decay_exponent = 0.0;        // |psi|^2 power-law fit, final decade
  double residence_fraction = 0.0;    // fraction of final decade with alpha in pi +- pi/2
};

struct CaptureVerdict {
  Verdict verdict = Verdict::Undecided;
  CaptureDiagnostics diagnostics;
};

// Classifies a stored trajectory (Original, Slow, or Polar frame) spanning at
// least two decades of tau.  Captured: final-decade mean of (1 + rho) within
// the amplitude band and phase residence above the threshold.  NotCaptured:
// final-decade |psi|^2 power-law exponent within decay_tol of decay_exponent.
// Otherwise Undecided.
CaptureVerdict classify_trajectory(const TrajectoryRecord<Vec2>& traj,
                                   const ForcingLaw& law,
                                   const ClassifyConfig& ccfg = {});

// Initial condition for scans: the truncated asymptote of parity n, or an
// explicit polar state, at the scan's tau0.
struct ScanIC {
  enum class Kind { Asymptote, Explicit };
  Kind kind = Kind::Asymptote;
  int n = 1;
  double rho = 0.0;
  double alpha = 0.0;
};

struct ScanCell {
  double lambda = 0.0;
  double F = 0.0;
  double captured_fraction = 0.0;
  double undecided_fraction = 0.0;
  int n_samples = 0;
};

// Capture map over a (lambda, F) grid: integrates every IC through the polar
// flow over [tau0, tau1] and classifies.  Per-trajectory failures count as
// Undecided and never abort the scan.  Deterministic given the grids; the
// seed is carried into provenance only.
std::vector<ScanCell> capture_scan(const std::vector<double>& lambda_grid,
                                   const std::vector<double>& F_grid,
                                   const std::vector<ScanIC>& ic_grid,
                                   double tau0, double tau1,
                                   const IntegratorConfig& cfg,
                                   std::uint64_t seed,
                                   const ClassifyConfig& ccfg = {});

} // namespace autoreson
