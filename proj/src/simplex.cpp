#include "chirpfit/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "chirpfit/errors.hpp"

namespace chirpfit {

namespace {

std::string point_to_string(const std::vector<double>& x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << x[i];
  }
  os << ')';
  return os.str();
}

}  // namespace

OptimResult minimize(const Objective& f, const std::vector<double>& x0,
                     const SimplexConfig& cfg) {
  const std::size_t d = x0.size();
  if (d == 0) throw DataError("minimize: empty start point");
  if (!(cfg.x_tol > 0.0)) throw DataError("minimize: x_tol must be positive");
  if (!(cfg.reflection > 0.0) || !(cfg.expansion > 1.0) ||
      !(cfg.contraction > 0.0) || cfg.contraction >= 1.0 ||
      !(cfg.shrink > 0.0) || cfg.shrink >= 1.0)
    throw DataError("minimize: simplex coefficients out of range");
  if (!cfg.init_step.empty() && cfg.init_step.size() != 1 &&
      cfg.init_step.size() != d)
    throw DataError("minimize: init_step size must be 1 or match the dimension");

  const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : 500 * static_cast<int>(d);

  int evaluations = 0;
  auto eval = [&](const std::vector<double>& x) {
    const double v = f(x);
    ++evaluations;
    if (!std::isfinite(v))
      throw NumericalError("minimize: objective is not finite at " +
                           point_to_string(x));
    return v;
  };

  // Initial simplex: x0 plus one offset vertex per dimension.
  std::vector<std::vector<double>> verts(d + 1, x0);
  for (std::size_t i = 0; i < d; ++i) {
    double step;
    if (cfg.init_step.empty())
      step = 0.05 * (1.0 + std::fabs(x0[i]));
    else if (cfg.init_step.size() == 1)
      step = cfg.init_step[0];
    else
      step = cfg.init_step[i];
    if (!(step != 0.0) || !std::isfinite(step))
      throw DataError("minimize: init_step entries must be nonzero and finite");
    verts[i + 1][i] += step;
  }
  std::vector<double> fv(d + 1);
  for (std::size_t i = 0; i <= d; ++i) fv[i] = eval(verts[i]);

  // Auto f_tol scales with the initial simplex spread, which is invariant
  // under adding a constant to the objective: two objectives that differ
  // only by a constant stop at exactly the same iterate.
  const double spread0 =
      *std::max_element(fv.begin(), fv.end()) -
      *std::min_element(fv.begin(), fv.end());
  const double f_tol_eff =
      cfg.f_tol >= 0.0 ? cfg.f_tol : 1e-10 * (1.0 + spread0);

  std::vector<std::size_t> order(d + 1);
  std::vector<double> centroid(d), xr(d), xe(d), xc(d);

  auto sort_order = [&]() {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
  };

  auto converged_now = [&]() {
    const std::size_t best = order[0];
    const std::size_t worst = order[d];
    double diameter = 0.0;
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < d; ++j)
        diameter = std::max(diameter,
                            std::fabs(verts[i][j] - verts[best][j]));
    }
    const double spread = fv[worst] - fv[best];
    return diameter < cfg.x_tol && spread < f_tol_eff;
  };

  int iter = 0;
  bool converged = false;
  sort_order();
  while (iter < max_iter) {
    if (converged_now()) {
      converged = true;
      break;
    }
    ++iter;

    const std::size_t worst = order[d];
    const std::size_t second = order[d - 1];
    const std::size_t best = order[0];

    // Centroid of all vertices except the worst.
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < d; ++j) centroid[j] += verts[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(d);

    for (std::size_t j = 0; j < d; ++j)
      xr[j] = centroid[j] + cfg.reflection * (centroid[j] - verts[worst][j]);
    const double fr = eval(xr);

    if (fr < fv[best]) {
      for (std::size_t j = 0; j < d; ++j)
        xe[j] = centroid[j] + cfg.expansion * (xr[j] - centroid[j]);
      const double fe = eval(xe);
      if (fe < fr) {
        verts[worst] = xe;
        fv[worst] = fe;
      } else {
        verts[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      verts[worst] = xr;
      fv[worst] = fr;
    } else {
      bool shrink_step = false;
      if (fr < fv[worst]) {
        // Outside contraction, between the reflected point and the centroid.
        for (std::size_t j = 0; j < d; ++j)
          xc[j] = centroid[j] + cfg.contraction * (xr[j] - centroid[j]);
        const double fc = eval(xc);
        if (fc <= fr) {
          verts[worst] = xc;
          fv[worst] = fc;
        } else {
          shrink_step = true;
        }
      } else {
        // Inside contraction, toward the worst vertex.
        for (std::size_t j = 0; j < d; ++j)
          xc[j] = centroid[j] + cfg.contraction * (verts[worst][j] - centroid[j]);
        const double fc = eval(xc);
        if (fc < fv[worst]) {
          verts[worst] = xc;
          fv[worst] = fc;
        } else {
          shrink_step = true;
        }
      }
      if (shrink_step) {
        for (std::size_t i = 0; i <= d; ++i) {
          if (i == best) continue;
          for (std::size_t j = 0; j < d; ++j)
            verts[i][j] =
                verts[best][j] + cfg.shrink * (verts[i][j] - verts[best][j]);
          fv[i] = eval(verts[i]);
        }
      }
    }
    sort_order();
  }

  sort_order();
  OptimResult res;
  res.argmin = verts[order[0]];
  // The start point is a vertex and only worst vertices are ever replaced
  // (by strictly better points), so fv[best] <= f(x0) throughout.
  res.value = fv[order[0]];
  res.iterations = iter;
  res.evaluations = evaluations;
  res.converged = converged;
  return res;
}

}  // namespace chirpfit
