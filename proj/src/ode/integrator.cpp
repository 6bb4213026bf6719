#include "diffreg/ode/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "diffreg/core/errors.hpp"
#include "diffreg/simd/kernels.hpp"

namespace diffreg {
namespace {

struct Stage {
  std::vector<double> k1, k2, k3, k4, y_next, y_stage;

  void resize(std::size_t n) {
    k1.resize(n); k2.resize(n); k3.resize(n); k4.resize(n);
    y_next.resize(n); y_stage.resize(n);
  }
};

// One Bogacki-Shampine step from y with size h; fills s.y_next and returns
// the embedded error estimate vector in s.y_stage.
void bs3_step(const OdeRhs& rhs, const std::vector<double>& y, double t,
              double h, Stage& s, OdeStats& stats, bool want_error) {
  const std::size_t n = y.size();

  rhs(t, y, s.k1);
  s.y_stage = y;
  simd::axpy(h * 0.5, s.k1.data(), s.y_stage.data(), n);
  rhs(t + 0.5 * h, s.y_stage, s.k2);

  s.y_stage = y;
  simd::axpy(h * 0.75, s.k2.data(), s.y_stage.data(), n);
  rhs(t + 0.75 * h, s.y_stage, s.k3);

  s.y_next = y;
  simd::axpy(h * 2.0 / 9.0, s.k1.data(), s.y_next.data(), n);
  simd::axpy(h / 3.0, s.k2.data(), s.y_next.data(), n);
  simd::axpy(h * 4.0 / 9.0, s.k3.data(), s.y_next.data(), n);
  stats.rhs_evaluations += 3;

  if (want_error) {
    rhs(t + h, s.y_next, s.k4);
    ++stats.rhs_evaluations;
    // Difference between the 3rd- and 2nd-order solutions.
    std::fill(s.y_stage.begin(), s.y_stage.end(), 0.0);
    simd::axpy(h * (2.0 / 9.0 - 7.0 / 24.0), s.k1.data(), s.y_stage.data(), n);
    simd::axpy(h * (1.0 / 3.0 - 1.0 / 4.0), s.k2.data(), s.y_stage.data(), n);
    simd::axpy(h * (4.0 / 9.0 - 1.0 / 3.0), s.k3.data(), s.y_stage.data(), n);
    simd::axpy(h * (-1.0 / 8.0), s.k4.data(), s.y_stage.data(), n);
  }
}

}  // namespace

OdeStats integrate_adaptive(const OdeRhs& rhs, std::vector<double>& y,
                            const OdeOptions& opts,
                            const OdeStepCallback& on_accept) {
  OdeStats stats;
  if (opts.t_final <= 0.0) return stats;

  Stage s;
  s.resize(y.size());
  double t = 0.0;
  double h = opts.initial_step > 0.0 ? opts.initial_step : opts.t_final / 10.0;

  while (t < opts.t_final) {
    h = std::min(h, opts.t_final - t);
    if (h < opts.min_step)
      throw StepFailure("integrate_adaptive: step size underflow");

    bs3_step(rhs, y, t, h, s, stats, true);

    double err_sq = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double scale =
          opts.atol +
          opts.rtol * std::max(std::abs(y[i]), std::abs(s.y_next[i]));
      const double e = s.y_stage[i] / scale;
      err_sq += e * e;
    }
    // The 5x safety keeps accumulated global error inside the user
    // tolerances on neutral (non-contracting) systems.
    const double err =
        5.0 * std::sqrt(err_sq / static_cast<double>(y.size()));

    if (err <= 1.0) {
      t += h;
      y = s.y_next;
      ++stats.accepted_steps;
      if (on_accept) on_accept(t, y);
    } else {
      ++stats.rejected_steps;
    }
    double factor = 0.2;  // non-finite error norms force a hard shrink
    if (std::isfinite(err))
      factor = err > 0.0
                   ? std::clamp(0.9 * std::pow(err, -1.0 / 3.0), 0.2, 5.0)
                   : 5.0;
    h *= factor;
  }
  return stats;
}

void integrate_fixed(const OdeRhs& rhs, std::vector<double>& y, double t_final,
                     int steps) {
  if (t_final <= 0.0 || steps <= 0) return;
  Stage s;
  s.resize(y.size());
  OdeStats stats;
  const double h = t_final / steps;
  double t = 0.0;
  for (int i = 0; i < steps; ++i) {
    bs3_step(rhs, y, t, h, s, stats, false);
    y = s.y_next;
    t += h;
  }
}

}  // namespace diffreg
