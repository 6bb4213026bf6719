#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "diffreg/core/errors.hpp"
#include "diffreg/ode/integrator.hpp"

using namespace diffreg;

namespace {

const OdeRhs kDecay = [](double, const std::vector<double>& y,
                         std::vector<double>& dy) {
  dy.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) dy[i] = -y[i];
};

// Circular motion: (x, y)' = (-y, x); solution rotates at unit rate.
const OdeRhs kRotation = [](double, const std::vector<double>& y,
                            std::vector<double>& dy) {
  dy.resize(2);
  dy[0] = -y[1];
  dy[1] = y[0];
};

}  // namespace

TEST_CASE("zero time span is the identity") {
  std::vector<double> y{1.0, -2.0, 3.0};
  const std::vector<double> before = y;
  OdeOptions opts;
  opts.t_final = 0.0;
  const OdeStats stats = integrate_adaptive(kDecay, y, opts);
  CHECK(y == before);
  CHECK(stats.accepted_steps == 0);
}

TEST_CASE("linear decay matches exp(-t) within rtol/atol") {
  std::vector<double> y{1.0};
  OdeOptions opts;
  opts.t_final = 1.0;
  opts.rtol = 0.01;
  opts.atol = 0.01;
  integrate_adaptive(kDecay, y, opts);
  const double exact = std::exp(-1.0);
  CHECK(std::abs(y[0] - exact) <= opts.rtol * std::abs(exact) + opts.atol);
}

TEST_CASE("rotation system lands on the analytic solution") {
  std::vector<double> y{1.0, 0.0};
  OdeOptions opts;
  opts.t_final = 2.0;
  opts.rtol = 0.01;
  opts.atol = 0.01;
  integrate_adaptive(kRotation, y, opts);
  const double ex = std::cos(2.0), ey = std::sin(2.0);
  CHECK(std::abs(y[0] - ex) <= opts.rtol * std::abs(ex) + opts.atol);
  CHECK(std::abs(y[1] - ey) <= opts.rtol * std::abs(ey) + opts.atol);
}

TEST_CASE("tight tolerances track the solution closely") {
  std::vector<double> y{1.0};
  OdeOptions opts;
  opts.t_final = 1.0;
  opts.rtol = 1e-8;
  opts.atol = 1e-8;
  const OdeStats stats = integrate_adaptive(kDecay, y, opts);
  CHECK(std::abs(y[0] - std::exp(-1.0)) < 1e-6);
  CHECK(stats.accepted_steps > 10);  // tighter tolerance forces more steps
}

TEST_CASE("halving a fixed step cuts the error by at least 8x") {
  auto error_at = [](int steps) {
    std::vector<double> y{1.0};
    integrate_fixed(kDecay, y, 1.0, steps);
    return std::abs(y[0] - std::exp(-1.0));
  };
  const double coarse = error_at(8);
  const double fine = error_at(16);
  CHECK(coarse / fine >= 8.0);

  // The rotation system's ratio approaches 8 from below (order 3, leading
  // term alternating); anything near 8 rules out order 2 (ratio 4).
  auto rot_error_at = [](int steps) {
    std::vector<double> y{1.0, 0.0};
    integrate_fixed(kRotation, y, 1.5, steps);
    const double dx = y[0] - std::cos(1.5), dy = y[1] - std::sin(1.5);
    return std::sqrt(dx * dx + dy * dy);
  };
  CHECK(rot_error_at(8) / rot_error_at(16) >= 7.5);
}

TEST_CASE("step underflow raises StepFailure") {
  const OdeRhs nan_rhs = [](double, const std::vector<double>& y,
                            std::vector<double>& dy) {
    dy.assign(y.size(), std::numeric_limits<double>::quiet_NaN());
  };
  std::vector<double> y{1.0};
  OdeOptions opts;
  opts.t_final = 1.0;
  CHECK_THROWS_AS(integrate_adaptive(nan_rhs, y, opts), StepFailure);
}

TEST_CASE("accept callback fires once per accepted step") {
  std::vector<double> y{1.0};
  OdeOptions opts;
  opts.t_final = 1.0;
  int calls = 0;
  double last_t = 0.0;
  const OdeStats stats =
      integrate_adaptive(kDecay, y, opts, [&](double t, const auto&) {
        ++calls;
        CHECK(t > last_t);
        last_t = t;
      });
  CHECK(calls == stats.accepted_steps);
  CHECK(last_t == doctest::Approx(1.0));
}
