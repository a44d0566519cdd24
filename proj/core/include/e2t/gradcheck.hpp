#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "e2t/tape.hpp"

namespace e2t {

// Finite-difference validation of the backward pass. The checker only drives
// forward evaluations, so it stays independent of the gradient code it tests.

using ForwardBuilder = std::function<Tape::Var(Tape&, const ParamMap&)>;

// Max over all parameter entries of |analytic - central_fd| normalized by
// (|analytic| + |central_fd| + 1e-4).
double finite_difference_max_error(const ForwardBuilder& forward, ParamMap& params,
                                   double step = 1e-5);

struct GradCheckResult {
  std::string name;
  double max_rel_err = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Per-operation and end-to-end checks on small random shapes. Per-op
// tolerance is 1e-4; the whole-loss checks use 1e-3.
std::vector<GradCheckResult> run_gradient_suite(std::uint64_t seed = 20240501);

std::string format_gradcheck(const GradCheckResult& r);
bool all_passed(const std::vector<GradCheckResult>& results);

}  // namespace e2t
