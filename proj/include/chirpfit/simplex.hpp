#pragma once

#include <functional>
#include <vector>

namespace chirpfit {

// Configuration of the derivative-free downhill-simplex minimizer.
//
// init_step gives the per-dimension offsets used to build the starting
// simplex around x0 (one element broadcasts; empty picks
// 0.05 * (1 + |x0_i|) per dimension). f_tol < 0 selects the automatic
// value-spread threshold 1e-10 * (1 + initial simplex spread), which is
// invariant under adding a constant to the objective.
// max_iter == 0 selects 500 * dimension.
struct SimplexConfig {
  std::vector<double> init_step;
  double x_tol = 1e-10;
  double f_tol = -1.0;
  int max_iter = 0;
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
};

struct OptimResult {
  std::vector<double> argmin;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(const std::vector<double>&)>;

// Minimizes f from x0 with the classic reflect / expand / contract / shrink
// moves. Convergence requires the simplex diameter (max-norm distance of any
// vertex from the best one) to fall below x_tol and the value spread
// f(worst) - f(best) to fall below the f_tol threshold; hitting max_iter
// first returns the best vertex with converged = false. The best value never
// increases from one iteration to the next, and the result value never
// exceeds f(x0).
//
// Throws DataError for empty x0, bad config values, or init_step size
// mismatch; throws NumericalError when the objective returns a non-finite
// value (the offending point is reported).
OptimResult minimize(const Objective& f, const std::vector<double>& x0,
                     const SimplexConfig& cfg = {});

}  // namespace chirpfit
