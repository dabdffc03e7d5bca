#pragma once

#include <cstdint>

#include "autoreson/fit.hpp"
#include "autoreson/integrator.hpp"
#include "autoreson/models.hpp"
#include "autoreson/types.hpp"

namespace autoreson {

// Decay exponents attached to a forcing law: kappa governs the amplitude
// offset (rho ~ tau^{-kappa}) and mu the phase offset (alpha - pi n ~ tau^{-mu}).
struct Exponents {
  double A = 0.0;
  double kappa = 0.0;
  double mu = 0.0;
  bool admissible = false; // 0 < A < 1
};

Exponents exponents(double lambda);

// Exponent of the correction lattice: chi(m, l) = A*l + (1-A)*m.
double chi(int m, int l, double A);

struct LeadingCoefficients {
  double r = 0.0; // (-1)^n F / 2
  double a = 0.0; // (-1)^n / (4 F)
};

// Throws std::domain_error for F <= 0 (degenerate forcing: `a` undefined)
// and std::invalid_argument for n outside {0, 1}.
LeadingCoefficients leading_coefficients(double F, int n);

// Leading-order synchronized solution around the parity branch alpha = pi n:
//   rho*(tau)  = r * tau^{-A},
//   alpha*(tau) = pi n + a * tau^{A-1}.
struct AsymptoticProfile {
  double A = 0.0;
  double kappa = 0.0;
  double mu = 0.0;
  int n = 1;
  double r_lead = 0.0;
  double a_lead = 0.0;
  ForcingLaw law;

  static AsymptoticProfile make(const ForcingLaw& law, int n);
  bool admissible() const { return A > 0.0 && A < 1.0; }
};

PolarState truncated_asymptote(const AsymptoticProfile& p, double tau);

// Analytic (power-rule) derivative of the truncation: (d rho*/d tau, d alpha*/d tau).
Vec2 truncated_asymptote_derivative(const AsymptoticProfile& p, double tau);

// Defects of the truncated profile in the two polar flow equations
// (radial equation in the printed-sign convention):
//   res_rho   = rho*' - [F tau^{-A} sin(alpha*) - (1 + rho*)/(4 tau)]
//   res_alpha = alpha*' - [(1 + rho*)^2 - 1 - F tau^{-A} cos(alpha*)/(1 + rho*)]
struct ResidualPair {
  double res_rho = 0.0;
  double res_alpha = 0.0;
};

ResidualPair residual_norm(const AsymptoticProfile& p, double tau);

// Numerical confirmation of the decay exponents: integrates the polar flow
// from the truncated asymptote at tau0 and fits |rho| and |alpha - pi n| over
// the last two decades of [tau0, tau1].  ratio_mean is the mean of
// rho(tau) tau^A / r over the last decade (→ 1 on the synchronized branch).
struct ExponentVerification {
  PowerLawFit fit_rho;
  PowerLawFit fit_alpha;
  double ratio_mean = 0.0;
};

// Throws EscapeError if the trajectory leaves |rho| <= 0.5, |alpha - pi n| <= 1
// or the integration fails (meaningful escape for the n = 0 branch).
ExponentVerification verify_exponents(const ForcingLaw& law, int n,
                                      const IntegratorConfig& cfg,
                                      double tau0 = 1e2, double tau1 = 1e5);

} // namespace autoreson
