#include "autoreson/capture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "autoreson/fit.hpp"
#include "autoreson/parallel.hpp"

namespace autoreson {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kBoundaryTol = 1e-9;
} // namespace

CaptureFrame capture_frame(double epsilon, double lambda) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw std::domain_error("capture_frame: epsilon must lie in (0, 1)");
  CaptureFrame f;
  f.epsilon = epsilon;
  f.lambda = lambda;
  f.delta = std::pow(epsilon, 1.5 - 2.0 * lambda);
  f.drive = std::pow(epsilon, 1.0 + 4.0 * lambda);
  f.valid = f.delta < 0.2;
  return f;
}

Vec2 rhs_capture(double s, double rho, double alpha, const CaptureFrame& frame,
                 double F) {
  const double D = frame.drive;
  const double base = 1.0 + frame.delta * D * s;
  if (!(base > 0.0))
    throw std::domain_error("rhs_capture: drive base 1 + delta*D*s must be positive");
  const double denom = 1.0 + frame.delta * rho;
  if (!(denom > 0.0))
    throw std::domain_error("rhs_capture: 1 + delta*rho must stay positive");
  const double drive_amp = std::pow(base, 2.0 * frame.lambda) * F * std::sin(alpha);
  const double drho = drive_amp;
  const double dalpha =
      2.0 * rho + D * s + frame.delta * (rho * rho - drive_amp / denom);
  return Vec2(drho, dalpha);
}

PendulumParams PendulumParams::from_forcing(double F, double epsilon,
                                            double lambda,
                                            bool printed_coefficient) {
  if (!(F > 0.0))
    throw std::domain_error("PendulumParams::from_forcing: F must be positive");
  PendulumParams prm;
  prm.Fp = printed_coefficient ? F : 2.0 * F;
  prm.D = std::pow(epsilon, 1.0 + 4.0 * lambda);
  return prm;
}

Vec2 pendulum_rhs(double alpha, double alpha_dot, const PendulumParams& prm) {
  return Vec2(alpha_dot, prm.Fp * std::sin(alpha) + prm.D);
}

double pendulum_energy(double alpha, double alpha_dot, const PendulumParams& prm) {
  return 0.5 * alpha_dot * alpha_dot + prm.Fp * std::cos(alpha) - prm.D * alpha;
}

std::vector<FixedPoint> pendulum_fixed_points(const PendulumParams& prm) {
  if (!(prm.Fp > 0.0))
    throw std::domain_error("pendulum_fixed_points: Fp must be positive");
  const double ratio = -prm.D / prm.Fp; // sin(alpha) = ratio at equilibria
  std::vector<FixedPoint> out;
  if (std::abs(ratio) > 1.0) return out;
  if (std::abs(ratio) == 1.0) {
    // sin(alpha) = +-1: cos vanishes, the center and saddle merge.
    const double alpha = ratio > 0.0 ? 0.5 * std::numbers::pi
                                     : 1.5 * std::numbers::pi;
    out.push_back(FixedPoint{alpha, FixedPointKind::Degenerate});
    return out;
  }
  const double base = std::asin(ratio); // in [-pi/2, pi/2], cos > 0: saddle
  double saddle = base < 0.0 ? base + kTwoPi : base;
  double center = std::numbers::pi - base; // cos < 0
  out.push_back(FixedPoint{saddle, FixedPointKind::Saddle});
  out.push_back(FixedPoint{center, FixedPointKind::Center});
  std::sort(out.begin(), out.end(),
            [](const FixedPoint& a, const FixedPoint& b) { return a.alpha < b.alpha; });
  return out;
}

Region inside_separatrix(double alpha, double alpha_dot, const PendulumParams& prm) {
  const auto fps = pendulum_fixed_points(prm);
  const auto saddle_it =
      std::find_if(fps.begin(), fps.end(), [](const FixedPoint& f) {
        return f.kind == FixedPointKind::Saddle;
      });
  if (saddle_it == fps.end()) return Region::Outside; // no loop exists

  // Reduce alpha into the loop window (alpha_s - 2 pi, alpha_s].  The loop is
  // bounded by the lower-energy of the two adjacent saddles: with torque D
  // the window's saddle energies differ by 2 pi D.
  const double alpha_s = saddle_it->alpha;
  double d = std::fmod(alpha - alpha_s, kTwoPi);
  if (d > 0.0) d -= kTwoPi;
  const double alpha_red = alpha_s + d;

  const double E_saddle = pendulum_energy(alpha_s, 0.0, prm) +
                          std::min(0.0, kTwoPi * prm.D);
  const double E = pendulum_energy(alpha_red, alpha_dot, prm);
  if (std::abs(E - E_saddle) < kBoundaryTol) return Region::Boundary;
  return E < E_saddle ? Region::Inside : Region::Outside;
}

namespace {

template <class Field>
std::optional<OrbitClass> classify_by_range(Field&& field, const Vec2& ic,
                                            double s_max,
                                            const IntegratorConfig& cfg) {
  IntegratorConfig c = cfg;
  c.dense = false;
  c.store = false;
  double lo = ic[0], hi = ic[0];
  bool full_turn = false;
  auto rec = integrate(field, ic, 0.0, s_max, c,
                       [&](double, const Vec2& y) {
                         lo = std::min(lo, y[0]);
                         hi = std::max(hi, y[0]);
                         if (hi - lo >= kTwoPi) {
                           full_turn = true;
                           return false;
                         }
                         return true;
                       });
  if (full_turn) return OrbitClass::Rotating;
  if (!rec.ok()) return std::nullopt;
  return OrbitClass::Librating;
}

} // namespace

std::optional<OrbitClass> classify_pendulum_orbit(double alpha, double alpha_dot,
                                                  const PendulumParams& prm,
                                                  double s_max,
                                                  const IntegratorConfig& cfg) {
  return classify_by_range(pendulum_field(prm), Vec2(alpha, alpha_dot), s_max, cfg);
}

std::optional<OrbitClass> classify_capture_orbit(double rho, double alpha,
                                                 const CaptureFrame& frame,
                                                 double F, double s_max,
                                                 const IntegratorConfig& cfg) {
  // The capture flow tracks alpha in the second slot.
  IntegratorConfig c = cfg;
  c.dense = false;
  c.store = false;
  const Vec2 ic(rho, alpha);
  double lo = alpha, hi = alpha;
  bool full_turn = false;
  auto rec = integrate(capture_field(frame, F), ic, 0.0, s_max, c,
                       [&](double, const Vec2& y) {
                         lo = std::min(lo, y[1]);
                         hi = std::max(hi, y[1]);
                         if (hi - lo >= kTwoPi) {
                           full_turn = true;
                           return false;
                         }
                         return true;
                       });
  if (full_turn) return OrbitClass::Rotating;
  if (!rec.ok()) return std::nullopt;
  return OrbitClass::Librating;
}

CaptureVerdict classify_trajectory(const TrajectoryRecord<Vec2>& traj,
                                   const ForcingLaw& law,
                                   const ClassifyConfig& ccfg) {
  (void)law;
  if (traj.times.size() < 2)
    throw std::invalid_argument("classify_trajectory: insufficient data (empty trajectory)");
  if (traj.frame != Frame::Original && traj.frame != Frame::Slow &&
      traj.frame != Frame::Polar)
    throw std::invalid_argument("classify_trajectory: unsupported frame");

  // Per-sample (tau, 1 + rho, alpha mod 2 pi) in slow-frame terms.
  const std::size_t m = traj.times.size();
  std::vector<double> tau(m), amp(m), alpha(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double tk = traj.times[k];
    const Vec2& y = traj.states[k];
    switch (traj.frame) {
      case Frame::Original: {
        if (!(tk > 0.0))
          throw std::invalid_argument("classify_trajectory: nonpositive time sample");
        tau[k] = 0.5 * tk * tk;
        amp[k] = std::abs(cplx(y)) / std::sqrt(tk);
        alpha[k] = std::arg(cplx(y)); // arg(psi e^{-i tau}) = arg(Psi)
        break;
      }
      case Frame::Slow: {
        tau[k] = tk;
        const PolarState p = polar_from_complex(cplx(y), tk);
        amp[k] = 1.0 + p.rho;
        alpha[k] = p.alpha;
        break;
      }
      default: { // Polar
        tau[k] = tk;
        amp[k] = 1.0 + y[0];
        alpha[k] = y[1];
        break;
      }
    }
  }
  if (!(tau.front() > 0.0) || tau.back() / tau.front() < 100.0 * (1.0 - 1e-12))
    throw std::invalid_argument(
        "classify_trajectory: insufficient data (needs >= 2 decades of tau)");

  const double decade_lo = tau.back() / 10.0;
  std::vector<double> dt, damp2;
  double amp_sum = 0.0;
  std::size_t n_dec = 0, n_res = 0;
  for (std::size_t k = 0; k < m; ++k) {
    if (tau[k] < decade_lo * (1.0 - 1e-12)) continue;
    ++n_dec;
    amp_sum += amp[k];
    if (std::abs(std::remainder(alpha[k] - std::numbers::pi, kTwoPi)) <=
        0.5 * std::numbers::pi)
      ++n_res;
    dt.push_back(tau[k]);
    damp2.push_back(amp[k] * amp[k]);
  }
  if (n_dec < 8)
    throw std::invalid_argument(
        "classify_trajectory: insufficient data (needs >= 8 samples in the final decade)");

  CaptureVerdict out;
  out.diagnostics.final_amplitude_ratio = amp_sum / static_cast<double>(n_dec);
  out.diagnostics.residence_fraction =
      static_cast<double>(n_res) / static_cast<double>(n_dec);
  out.diagnostics.decay_exponent = std::numeric_limits<double>::quiet_NaN();
  try {
    out.diagnostics.decay_exponent = fit_power_law(dt, damp2).exponent;
  } catch (const std::exception&) {
    // amplitude hit zero exactly; the diagnostic stays NaN
  }

  const bool amp_ok = out.diagnostics.final_amplitude_ratio >= ccfg.amp_lo &&
                      out.diagnostics.final_amplitude_ratio <= ccfg.amp_hi;
  const bool res_ok = out.diagnostics.residence_fraction > ccfg.residence_min;
  if (amp_ok && res_ok) {
    out.verdict = Verdict::Captured;
  } else if (std::abs(out.diagnostics.decay_exponent - ccfg.decay_exponent) <=
             ccfg.decay_tol) {
    out.verdict = Verdict::NotCaptured;
  } else {
    out.verdict = Verdict::Undecided;
  }
  return out;
}

std::vector<ScanCell> capture_scan(const std::vector<double>& lambda_grid,
                                   const std::vector<double>& F_grid,
                                   const std::vector<ScanIC>& ic_grid,
                                   double tau0, double tau1,
                                   const IntegratorConfig& cfg,
                                   std::uint64_t seed,
                                   const ClassifyConfig& ccfg) {
  (void)seed; // the scan is fully determined by its grids; seed is provenance
  if (lambda_grid.empty() || F_grid.empty() || ic_grid.empty())
    throw std::invalid_argument("capture_scan: grids must be nonempty");
  if (!(tau0 > 0.0) || tau1 / tau0 < 100.0 * (1.0 - 1e-12))
    throw std::invalid_argument("capture_scan: tau span must cover >= 2 decades");

  const std::size_t n_cells = lambda_grid.size() * F_grid.size();
  const std::size_t n_ics = ic_grid.size();
  std::vector<Verdict> verdicts(n_cells * n_ics, Verdict::Undecided);

  IntegratorConfig run_cfg = cfg;
  run_cfg.dense = false;
  run_cfg.store = true;

  parallel_for(n_cells * n_ics, [&](std::size_t job) {
    const std::size_t cell = job / n_ics;
    const std::size_t ic_idx = job % n_ics;
    const double lambda = lambda_grid[cell / F_grid.size()];
    const double F = F_grid[cell % F_grid.size()];
    const ForcingLaw law{F, lambda};
    const ScanIC& ic = ic_grid[ic_idx];
    try {
      PolarState start;
      if (ic.kind == ScanIC::Kind::Asymptote) {
        start = truncated_asymptote(AsymptoticProfile::make(law, ic.n), tau0);
      } else {
        start = PolarState{ic.rho, ic.alpha, tau0};
      }
      auto rec = integrate(polar_field(law, PolarConvention::Paper),
                           Vec2(start.rho, start.alpha), tau0, tau1, run_cfg);
      rec.frame = Frame::Polar;
      verdicts[job] = classify_trajectory(rec, law, ccfg).verdict;
    } catch (const std::exception&) {
      verdicts[job] = Verdict::Undecided;
    }
  });

  std::vector<ScanCell> out;
  out.reserve(n_cells);
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    ScanCell c;
    c.lambda = lambda_grid[cell / F_grid.size()];
    c.F = F_grid[cell % F_grid.size()];
    c.n_samples = static_cast<int>(n_ics);
    int captured = 0, undecided = 0;
    for (std::size_t i = 0; i < n_ics; ++i) {
      const Verdict v = verdicts[cell * n_ics + i];
      if (v == Verdict::Captured) ++captured;
      if (v == Verdict::Undecided) ++undecided;
    }
    c.captured_fraction = static_cast<double>(captured) / static_cast<double>(n_ics);
    c.undecided_fraction = static_cast<double>(undecided) / static_cast<double>(n_ics);
    out.push_back(c);
  }
  return out;
}

} // namespace autoreson
