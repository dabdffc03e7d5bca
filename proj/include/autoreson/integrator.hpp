#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "autoreson/types.hpp"

namespace autoreson {

enum class Status { Ok, MaxSteps, StepUnderflow, Divergence };

inline const char* status_name(Status s) {
  switch (s) {
    case Status::Ok: return "ok";
    case Status::MaxSteps: return "max_steps";
    case Status::StepUnderflow: return "step_underflow";
    case Status::Divergence: return "divergence";
  }
  return "?";
}

struct IntegratorConfig {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_init = 0.0;          // 0: choose automatically
  double h_max = 0.0;           // 0: uncapped
  long long max_steps = 10'000'000; // attempted steps (accepted + rejected)
  bool dense = true;            // keep per-step interpolation data
  bool store = true;            // record (time, state) at accepted steps
};

namespace detail {

// Dormand-Prince 5(4) tableau with first-same-as-last stage reuse.
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                        c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                        a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                        a65 = -5103.0 / 18656.0;
inline constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0,
                        b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                        b6 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                        e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                        e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0,
                        d7 = 69997945.0 / 29380423.0;

template <class Vec>
double error_norm(const Vec& err, const Vec& y0, const Vec& y1, double atol,
                  double rtol) {
  double acc = 0.0;
  for (int i = 0; i < err.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = err[i] / sc;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

} // namespace detail

// One accepted step's quartic interpolant, valid on [t0, t0 + h].
template <class Vec>
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  Vec r1, r2, r3, r4, r5;

  Vec eval(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
  }
};

template <class Vec>
struct TrajectoryRecord {
  Frame frame = Frame::Slow;
  Status status = Status::Ok;
  std::string error;            // empty unless status != Ok
  std::vector<double> times;    // accepted-step times (if cfg.store)
  std::vector<Vec> states;      // states at `times`
  std::vector<DenseStep<Vec>> dense;
  double last_time = 0.0;
  Vec last_state = Vec::Zero();
  long long n_steps = 0;        // accepted
  long long n_attempts = 0;     // accepted + rejected
  bool stopped_by_observer = false;

  bool ok() const { return status == Status::Ok; }

  // Interpolated state at any time covered by the dense data.
  Vec eval(double t) const {
    if (dense.empty())
      throw std::logic_error("TrajectoryRecord::eval: no dense data recorded");
    const double lo = dense.front().t0;
    const double hi = dense.back().t0 + dense.back().h;
    const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
    if (t < lo - slack || t > hi + slack)
      throw std::out_of_range("TrajectoryRecord::eval: time outside trajectory");
    auto it = std::upper_bound(
        dense.begin(), dense.end(), t,
        [](double tv, const DenseStep<Vec>& s) { return tv < s.t0; });
    if (it != dense.begin()) --it;
    return it->eval(std::clamp(t, lo, hi));
  }
};

// Adaptive embedded 5(4) integration of y' = field(t, y) from t0 to t1 > t0.
// The observer is called at the initial point and after every accepted step;
// returning false stops the run (status stays Ok, stopped_by_observer set).
// A std::domain_error thrown by the field, or a non-finite stage value, ends
// the run with Status::Divergence and the last accepted state preserved.
template <class Field, class Vec, class Observer>
TrajectoryRecord<Vec> integrate(Field&& field, const Vec& y0, double t0,
                                double t1, const IntegratorConfig& cfg,
                                Observer&& observe) {
  if (!(t1 > t0)) throw std::invalid_argument("integrate: requires t1 > t0");
  if (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0))
    throw std::invalid_argument("integrate: tolerances must be positive");

  TrajectoryRecord<Vec> rec;
  rec.last_time = t0;
  rec.last_state = y0;

  const double h_cap =
      cfg.h_max > 0.0 ? cfg.h_max : std::numeric_limits<double>::infinity();

  double t = t0;
  Vec y = y0;
  Vec k1;
  try {
    k1 = field(t, y);
  } catch (const std::domain_error& e) {
    rec.status = Status::Divergence;
    rec.error = e.what();
    return rec;
  }
  if (!k1.allFinite() || !y.allFinite()) {
    rec.status = Status::Divergence;
    rec.error = "non-finite state or derivative at start";
    return rec;
  }

  if (cfg.store) {
    rec.times.push_back(t);
    rec.states.push_back(y);
  }
  if (!observe(t, static_cast<const Vec&>(y))) {
    rec.stopped_by_observer = true;
    return rec;
  }

  // Initial step size: curvature probe, as in standard embedded RK codes.
  double h = cfg.h_init;
  if (!(h > 0.0)) {
    double d0 = 0.0, d1n = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double sc = cfg.atol + cfg.rtol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1n += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / static_cast<double>(y.size()));
    d1n = std::sqrt(d1n / static_cast<double>(y.size()));
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, t1 - t0);
    double h1 = h0;
    try {
      const Vec y_probe = y + h0 * k1;
      const Vec f_probe = field(t + h0, y_probe);
      double d2 = 0.0;
      for (int i = 0; i < y.size(); ++i) {
        const double sc = cfg.atol + cfg.rtol * std::abs(y[i]);
        const double q = (f_probe[i] - k1[i]) / sc;
        d2 += q * q;
      }
      d2 = std::sqrt(d2 / static_cast<double>(y.size())) / h0;
      const double dm = std::max(d1n, d2);
      h1 = (dm <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                         : std::pow(0.01 / dm, 0.2);
    } catch (const std::domain_error&) {
      // probe left the field's domain; keep the conservative first guess
    }
    h = std::min({100.0 * h0, h1, h_cap, t1 - t0});
    if (!(h > 0.0) || !std::isfinite(h)) h = 1e-6 * (t1 - t0);
  }

  double err_prev = 1.0;
  bool rejected_last = false;
  const double eps = std::numeric_limits<double>::epsilon();

  Vec k2, k3, k4, k5, k6, k7, y1, err_vec;
  while (t < t1) {
    if (rec.n_attempts >= cfg.max_steps) {
      rec.status = Status::MaxSteps;
      rec.error = "step budget exhausted";
      return rec;
    }
    h = std::min(h, h_cap);
    bool last = false;
    if (h >= t1 - t) {
      h = t1 - t;
      last = true;
    }
    if (h <= eps * std::max(std::abs(t), std::abs(t1 - t0))) {
      rec.status = Status::StepUnderflow;
      rec.error = "step size underflow";
      return rec;
    }
    ++rec.n_attempts;

    try {
      using namespace detail;
      k2 = field(t + c2 * h, Vec(y + h * (a21 * k1)));
      k3 = field(t + c3 * h, Vec(y + h * (a31 * k1 + a32 * k2)));
      k4 = field(t + c4 * h, Vec(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
      k5 = field(t + c5 * h,
                 Vec(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
      k6 = field(t + h, Vec(y + h * (a61 * k1 + a62 * k2 + a63 * k3 +
                                     a64 * k4 + a65 * k5)));
      y1 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = field(t + h, y1);
      err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    } catch (const std::domain_error& e) {
      rec.status = Status::Divergence;
      rec.error = e.what();
      return rec;
    }
    if (!y1.allFinite() || !err_vec.allFinite()) {
      rec.status = Status::Divergence;
      rec.error = "non-finite value during step";
      return rec;
    }

    const double err =
        detail::error_norm(err_vec, y, y1, cfg.atol, cfg.rtol);

    if (err <= 1.0) {
      if (cfg.dense) {
        using namespace detail;
        DenseStep<Vec> s;
        s.t0 = t;
        s.h = h;
        const Vec ydiff = y1 - y;
        const Vec bspl = h * k1 - ydiff;
        s.r1 = y;
        s.r2 = ydiff;
        s.r3 = bspl;
        s.r4 = ydiff - h * k7 - bspl;
        s.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        rec.dense.push_back(std::move(s));
      }
      t = last ? t1 : t + h;
      y = y1;
      k1 = k7;
      ++rec.n_steps;
      rec.last_time = t;
      rec.last_state = y;
      if (cfg.store) {
        rec.times.push_back(t);
        rec.states.push_back(y);
      }
      double scale = 0.9 * std::pow(std::max(err, 1e-10), -0.175) *
                     std::pow(std::max(err_prev, 1e-10), 0.1);
      scale = std::clamp(scale, 0.2, 5.0);
      if (rejected_last) scale = std::min(scale, 1.0);
      rejected_last = false;
      err_prev = std::max(err, 1e-10);
      h *= scale;
      if (!observe(t, static_cast<const Vec&>(y))) {
        rec.stopped_by_observer = true;
        return rec;
      }
    } else {
      double scale = 0.9 * std::pow(err, -0.175);
      h *= std::clamp(scale, 0.2, 1.0);
      rejected_last = true;
    }
  }
  return rec;
}

template <class Field, class Vec>
TrajectoryRecord<Vec> integrate(Field&& field, const Vec& y0, double t0,
                                double t1, const IntegratorConfig& cfg = {}) {
  return integrate(std::forward<Field>(field), y0, t0, t1, cfg,
                   [](double, const Vec&) { return true; });
}

// Fixed-step fifth-order integration (no error control, no interpolation).
// Used for order-of-convergence measurements.
template <class Field, class Vec>
TrajectoryRecord<Vec> integrate_fixed(Field&& field, const Vec& y0, double t0,
                                      double t1, long long n_steps) {
  if (!(t1 > t0)) throw std::invalid_argument("integrate_fixed: requires t1 > t0");
  if (n_steps <= 0) throw std::invalid_argument("integrate_fixed: n_steps must be positive");
  TrajectoryRecord<Vec> rec;
  rec.times.reserve(static_cast<size_t>(n_steps) + 1);
  rec.states.reserve(static_cast<size_t>(n_steps) + 1);
  const double h = (t1 - t0) / static_cast<double>(n_steps);
  double t = t0;
  Vec y = y0;
  rec.times.push_back(t);
  rec.states.push_back(y);
  using namespace detail;
  for (long long n = 0; n < n_steps; ++n) {
    t = t0 + static_cast<double>(n) * h;
    const Vec k1 = field(t, y);
    const Vec k2 = field(t + c2 * h, Vec(y + h * (a21 * k1)));
    const Vec k3 = field(t + c3 * h, Vec(y + h * (a31 * k1 + a32 * k2)));
    const Vec k4 = field(t + c4 * h, Vec(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const Vec k5 =
        field(t + c5 * h, Vec(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const Vec k6 = field(
        t + h, Vec(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    y = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    t = t0 + static_cast<double>(n + 1) * h;
    rec.times.push_back(t);
    rec.states.push_back(y);
    ++rec.n_steps;
    ++rec.n_attempts;
  }
  rec.last_time = t1;
  rec.last_state = y;
  return rec;
}

enum class EventDirection { Any, Rising, Falling };

// First time in the record's dense span where g(t, y(t)) crosses zero in the
// requested direction, located by bisection on the interpolant.
template <class Vec, class G>
std::optional<double> detect_event(const TrajectoryRecord<Vec>& rec, G&& g,
                                   EventDirection dir = EventDirection::Any) {
  if (rec.dense.empty())
    throw std::logic_error("detect_event: record has no dense data");
  auto value = [&](double t) { return g(t, rec.eval(t)); };
  for (const auto& step : rec.dense) {
    const double ta = step.t0;
    const double tb = step.t0 + step.h;
    double ga = value(ta);
    double gb = value(tb);
    if (ga == 0.0) {
      if (dir == EventDirection::Any || (dir == EventDirection::Rising && gb > 0) ||
          (dir == EventDirection::Falling && gb < 0))
        return ta;
      continue;
    }
    const bool crossing = ga * gb <= 0.0 && gb != ga;
    if (!crossing) continue;
    const bool rising = ga < 0.0;
    if (dir == EventDirection::Rising && !rising) continue;
    if (dir == EventDirection::Falling && rising) continue;
    double lo = ta, hi = tb;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (hi - lo < 1e-10 * std::max(1.0, std::abs(mid))) break;
      const double gm = value(mid);
      if (gm == 0.0) return mid;
      if ((gm < 0.0) == rising)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }
  return std::nullopt;
}

} // namespace autoreson
