#pragma once

#include <functional>
#include <vector>

namespace diffreg {

struct OdeOptions {
  double t_final = 1.0;
  double rtol = 0.01;
  double atol = 0.01;
  double min_step = 1e-8;
  double initial_step = 0.0;  // 0 picks t_final / 10
};

struct OdeStats {
  int accepted_steps = 0;
  int rejected_steps = 0;
  int rhs_evaluations = 0;
};

using OdeRhs = std::function<void(double t, const std::vector<double>& y,
                                  std::vector<double>& dy)>;
// Invoked after each accepted step; captured context may retune the rhs
// (graph rewiring) between steps.
using OdeStepCallback =
    std::function<void(double t, const std::vector<double>& y)>;

// Bogacki-Shampine 3(2) embedded pair with local extrapolation. The error
// norm is rms(err / (atol + rtol*max(|y|, |y_next|))); accepted when <= 1.
// Throws StepFailure when the step size underflows min_step.
OdeStats integrate_adaptive(const OdeRhs& rhs, std::vector<double>& y,
                            const OdeOptions& opts,
                            const OdeStepCallback& on_accept = {});

// Same scheme at a fixed step count, no error control (order checks).
void integrate_fixed(const OdeRhs& rhs, std::vector<double>& y,
                     double t_final, int steps);

}  // namespace diffreg
