#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "chirpfit/estimators.hpp"
#include "chirpfit/signal.hpp"

namespace chirpfit {

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Limit covariance structure of one component's estimates, in parameter
/// order (a_re, a_im, beta): sigma_inv is the normalized covariance shape
/// (symmetric positive definite for any nonzero amplitude), and scaled is
/// the finite-N variance diagonal sigma^2 * D sigma_inv D with
/// D = diag(N^{-1/2}, N^{-1/2}, N^{-5/2}).
struct AsymptoticCovariance {
  Mat3 sigma_inv{};
  std::array<double, 3> scaled{};
};

/// Normalized information-style matrix for one component:
/// [[2, 0, -(2/3) a_im], [0, 2, (2/3) a_re],
///  [-(2/3) a_im, (2/3) a_re, (2/5) |a|^2]].
/// Throws DataError when the amplitude is zero or parameters non-finite.
Mat3 sigma_matrix(const ChirpComponent& a);

/// Closed-form inverse of sigma_matrix. With p = a_re, q = a_im,
/// r = |a|^2, the matrix is (1/(8r)) *
/// [[4r + 5q^2, -5pq, 15q], [-5pq, 4r + 5p^2, -15p], [15q, -15p, 45]];
/// its (3,3) entry is 45/(8 |a|^2). Errors as sigma_matrix.
Mat3 sigma_inv_matrix(const ChirpComponent& a);

/// Finite-N variance diagonal (var(a_re), var(a_im), var(beta)) =
/// (sigma2*S11/N, sigma2*S22/N, sigma2*S33/N^5) with S = sigma_inv_matrix.
/// Throws DataError when n == 0 or sigma2 is not positive and finite.
std::array<double, 3> finite_n_variances(const ChirpComponent& a,
                                         double sigma2, std::size_t n);

/// Per-component scaled covariance blocks sigma2 * D S_k D for every
/// component of the model (cross-component blocks vanish). The same blocks
/// apply to joint and sequential fits. Errors as finite_n_variances.
std::vector<Mat3> multi_covariance(const ChirpModel& model, double sigma2,
                                   std::size_t n);

/// Bundles the normalized shape and the scaled diagonal for one component.
AsymptoticCovariance asymptotic_covariance(const ChirpComponent& a,
                                           double sigma2, std::size_t n);

/// Fills fit.covariance with the scaled per-component blocks implied by the
/// fitted components. Errors as finite_n_variances (a fitted amplitude of
/// exactly zero included).
void attach_covariance(FitResult& fit, double sigma2, std::size_t n);

}  // namespace chirpfit
