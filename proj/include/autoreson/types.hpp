#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace autoreson {

using Complex = std::complex<double>;

// Reference frames a state or trajectory can live in.
//  Original: complex envelope Psi(t) of the driven cubic oscillator.
//  Slow:     rescaled envelope psi(tau), tau = t^2/2, with the fast phase
//            e^{-i tau} factored out of the amplitude prefactor.
//  Polar:    (rho, alpha) amplitude and phase offsets around the
//            synchronized orbit: psi = (1 + rho) e^{i (tau + alpha)}.
//  Capture:  stretched polar coordinates near the resonance threshold.
//  Pendulum: the limiting driven-pendulum phase plane (alpha, alpha_dot).
enum class Frame { Original, Slow, Polar, Capture, Pendulum };

inline const char* frame_name(Frame f) {
  switch (f) {
    case Frame::Original: return "original";
    case Frame::Slow: return "slow";
    case Frame::Polar: return "polar";
    case Frame::Capture: return "capture";
    case Frame::Pendulum: return "pendulum";
  }
  return "?";
}

struct ComplexState {
  Complex value{0.0, 0.0};
  double time = 0.0; // t in Original frame, tau in Slow frame
  Frame frame = Frame::Slow;
};

struct PolarState {
  double rho = 0.0;   // amplitude offset: |psi| = 1 + rho
  double alpha = 0.0; // phase mismatch: arg(psi) = tau + alpha
  double tau = 1.0;
};

// Exact solution parameters for the drive-free cubic flow:
// psi(tau) = R exp(i (R^2 tau + a)).
struct UnperturbedParams {
  double R = 1.0;
  double a = 0.0;
};

// Power-law drive F tau^{-A} e^{i tau} in the slow frame, A = 3/4 - lambda.
// Admissible synchronized solutions require 0 < A < 1.
struct ForcingLaw {
  double F = 1.0;
  double lambda = 0.0;

  double exponent_A() const { return 0.75 - lambda; }
  bool admissible() const {
    const double A = exponent_A();
    return A > 0.0 && A < 1.0;
  }
  // Instantaneous drive amplitude F tau^{-A}.
  double slow_amplitude(double tau) const {
    if (!(tau > 0.0)) throw std::domain_error("slow_amplitude: tau must be positive");
    return F * std::pow(tau, lambda - 0.75);
  }
};

// Thrown when a trajectory leaves the domain where a reduced model is valid
// (e.g. the squared amplitude 1 + rho reaches zero in polar coordinates).
class EscapeError : public std::runtime_error {
 public:
  explicit EscapeError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace autoreson
