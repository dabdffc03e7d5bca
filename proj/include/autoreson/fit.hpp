#pragma once

#include <cstddef>
#include <vector>

namespace autoreson {

// Least-squares fit of y = C * t^p on log-log axes.
struct PowerLawFit {
  double exponent = 0.0;   // p
  double prefactor = 0.0;  // C
  double residual_rms = 0.0; // RMS of log-residuals
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::size_t n = 0;
};

// Fits log y = log C + p log t by linear least squares.  Requires at least
// 8 samples (throws std::invalid_argument) and strictly positive t and y
// (throws std::domain_error).
PowerLawFit fit_power_law(const std::vector<double>& t,
                          const std::vector<double>& y);

} // namespace autoreson
