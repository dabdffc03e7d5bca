#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "autoreson/types.hpp"

namespace autoreson {

using Vec2 = Eigen::Vector2d;

inline Complex cplx(const Vec2& v) { return Complex(v[0], v[1]); }
inline Vec2 vec2(const Complex& z) { return Vec2(z.real(), z.imag()); }

// ---------------------------------------------------------------------------
// Forcing-law parameterizations.
//
// In the original frame the drive is f(t) = f1 * t^{2 lambda}; in the slow
// frame the same drive appears as F * tau^{-A} * e^{i tau} with
// A = 3/4 - lambda and F = f1 * 2^{lambda - 3/4}.
// ---------------------------------------------------------------------------

inline double f1_to_F(double f1, double lambda) {
  return f1 * std::exp2(lambda - 0.75);
}

inline double F_to_f1(double F, double lambda) {
  return F * std::exp2(0.75 - lambda);
}

// ---------------------------------------------------------------------------
// Right-hand sides.
// ---------------------------------------------------------------------------

// Original frame: i Psi' + (|Psi|^2 - t) Psi = f(t), with f = f1 t^{2 lambda},
// solved for Psi':  Psi' = -i f + i (|Psi|^2 - t) Psi.
inline Complex rhs_primary(const Complex& Psi, double t, double f1, double lambda) {
  if (!(t > 0.0)) throw std::domain_error("rhs_primary: t must be positive");
  const Complex i(0.0, 1.0);
  const double f = f1 * std::pow(t, 2.0 * lambda);
  return -i * f + i * (std::norm(Psi) - t) * Psi;
}

inline Complex rhs_primary(const Complex& Psi, double t, const ForcingLaw& law) {
  return rhs_primary(Psi, t, F_to_f1(law.F, law.lambda), law.lambda);
}

// Slow frame: psi' = -i (F tau^{-A} e^{i tau} - |psi|^2 psi) - psi / (4 tau).
inline Complex rhs_slow(const Complex& psi, double tau, const ForcingLaw& law) {
  if (!(tau > 0.0)) throw std::domain_error("rhs_slow: tau must be positive");
  const Complex i(0.0, 1.0);
  const double amp = law.slow_amplitude(tau);
  return -i * (amp * std::polar(1.0, tau) - std::norm(psi) * psi) - psi / (4.0 * tau);
}

// Drive-free cubic flow psi' = i |psi|^2 psi, whose exact solutions are the
// constant-amplitude states R e^{i (R^2 tau + a)}.
inline Complex rhs_cubic(const Complex& psi) {
  const Complex i(0.0, 1.0);
  return i * std::norm(psi) * psi;
}

inline Complex unperturbed_solution(double tau, const UnperturbedParams& p) {
  return std::polar(p.R, p.R * p.R * tau + p.a);
}

// Growth rate of the squared amplitude along the slow flow:
// d|psi|^2/dtau = -2 F tau^{-A} Im(psi e^{-i tau}) - |psi|^2 / (2 tau).
inline double amplitude_rate(const Complex& psi, double tau, const ForcingLaw& law) {
  if (!(tau > 0.0)) throw std::domain_error("amplitude_rate: tau must be positive");
  const double amp = law.slow_amplitude(tau);
  return -2.0 * amp * std::imag(psi * std::polar(1.0, -tau)) - std::norm(psi) / (2.0 * tau);
}

// ---------------------------------------------------------------------------
// Frame changes between the original and slow descriptions:
//   tau = t^2 / 2,  psi(tau) = Psi(t) e^{i t^2/2} / sqrt(t),
// so Psi(t) = (2 tau)^{1/4} e^{-i tau} psi(tau).
// ---------------------------------------------------------------------------

inline ComplexState to_slow(const ComplexState& s) {
  if (s.frame != Frame::Original)
    throw std::invalid_argument("to_slow: state must be in the original frame");
  const double t = s.time;
  if (!(t > 0.0)) throw std::domain_error("to_slow: t must be positive");
  const double tau = 0.5 * t * t;
  return ComplexState{s.value * std::polar(1.0 / std::sqrt(t), tau), tau, Frame::Slow};
}

inline ComplexState from_slow(const ComplexState& s) {
  if (s.frame != Frame::Slow)
    throw std::invalid_argument("from_slow: state must be in the slow frame");
  const double tau = s.time;
  if (!(tau > 0.0)) throw std::domain_error("from_slow: tau must be positive");
  const double t = std::sqrt(2.0 * tau);
  return ComplexState{s.value * std::polar(std::sqrt(t), -tau), t, Frame::Original};
}

// ---------------------------------------------------------------------------
// Polar coordinates around the synchronized orbit:
//   psi = (1 + rho) e^{i (tau + alpha)}.
// ---------------------------------------------------------------------------

inline PolarState polar_from_complex(const Complex& psi, double tau) {
  return PolarState{std::abs(psi) - 1.0, std::arg(psi * std::polar(1.0, -tau)), tau};
}

// Branch of alpha chosen nearest to `alpha_hint` (continuity along a path).
inline PolarState polar_from_complex(const Complex& psi, double tau, double alpha_hint) {
  PolarState p = polar_from_complex(psi, tau);
  p.alpha = alpha_hint + std::remainder(p.alpha - alpha_hint, 2.0 * std::numbers::pi);
  return p;
}

inline Complex complex_from_polar(const PolarState& p) {
  if (1.0 + p.rho < 0.0)
    throw std::domain_error("complex_from_polar: 1 + rho must be nonnegative");
  return std::polar(1.0 + p.rho, p.tau + p.alpha);
}

// Two published sign conventions for the radial polar equation.  `Paper`
// reproduces the printed system (drive term +F tau^{-A} sin alpha in rho');
// `Pushforward` is what the slow complex flow induces on (rho, alpha)
// (drive term -F tau^{-A} sin alpha).  The angular equation is identical:
//   alpha' = (1 + rho)^2 - 1 - F tau^{-A} cos(alpha) / (1 + rho).
enum class PolarConvention { Paper, Pushforward };

inline Vec2 rhs_polar(const PolarState& p, const ForcingLaw& law,
                      PolarConvention conv = PolarConvention::Paper) {
  if (!(p.tau > 0.0)) throw std::domain_error("rhs_polar: tau must be positive");
  const double r = 1.0 + p.rho;
  if (!(r > 0.0)) throw std::domain_error("rhs_polar: 1 + rho must stay positive");
  const double amp = law.slow_amplitude(p.tau);
  const double drive = amp * std::sin(p.alpha);
  const double rho_dot =
      (conv == PolarConvention::Paper ? drive : -drive) - r / (4.0 * p.tau);
  const double alpha_dot = r * r - 1.0 - amp * std::cos(p.alpha) / r;
  return Vec2(rho_dot, alpha_dot);
}

// Difference between the two radial conventions, rho'_paper - rho'_pushforward
// = 2 F tau^{-A} sin(alpha).  Zero exactly where the conventions agree.
inline double polar_convention_gap(const PolarState& p, const ForcingLaw& law) {
  if (!(p.tau > 0.0)) throw std::domain_error("polar_convention_gap: tau must be positive");
  return 2.0 * law.slow_amplitude(p.tau) * std::sin(p.alpha);
}

// ---------------------------------------------------------------------------
// Vector-field adapters for the integrator (state packed as Vector2d).
// ---------------------------------------------------------------------------

inline auto slow_field(const ForcingLaw& law) {
  return [law](double tau, const Vec2& y) { return vec2(rhs_slow(cplx(y), tau, law)); };
}

inline auto original_field(const ForcingLaw& law) {
  const double f1 = F_to_f1(law.F, law.lambda);
  const double lambda = law.lambda;
  return [f1, lambda](double t, const Vec2& y) {
    return vec2(rhs_primary(cplx(y), t, f1, lambda));
  };
}

inline auto cubic_field() {
  return [](double, const Vec2& y) { return vec2(rhs_cubic(cplx(y))); };
}

inline auto polar_field(const ForcingLaw& law,
                        PolarConvention conv = PolarConvention::Paper) {
  return [law, conv](double tau, const Vec2& y) {
    return rhs_polar(PolarState{y[0], y[1], tau}, law, conv);
  };
}

} // namespace autoreson
