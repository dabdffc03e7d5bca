#include "autoreson/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace autoreson {

PowerLawFit fit_power_law(const std::vector<double>& t,
                          const std::vector<double>& y) {
  if (t.size() != y.size())
    throw std::invalid_argument("fit_power_law: t and y sizes differ");
  if (t.size() < 8)
    throw std::invalid_argument("fit_power_law: needs at least 8 samples");

  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ti = t[static_cast<std::size_t>(i)];
    const double yi = y[static_cast<std::size_t>(i)];
    if (!(ti > 0.0) || !(yi > 0.0))
      throw std::domain_error("fit_power_law: t and y must be positive");
    X(i, 0) = 1.0;
    X(i, 1) = std::log(ti);
    b(i) = std::log(yi);
  }

  const Eigen::Vector2d coef = X.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd resid = b - X * coef;

  PowerLawFit fit;
  fit.exponent = coef(1);
  fit.prefactor = std::exp(coef(0));
  fit.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(n));
  auto [lo, hi] = std::minmax_element(t.begin(), t.end());
  fit.t_lo = *lo;
  fit.t_hi = *hi;
  fit.n = t.size();
  return fit;
}

} // namespace autoreson
