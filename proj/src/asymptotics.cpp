#include "chirpfit/asymptotics.hpp"

#include <cmath>

#include "chirpfit/errors.hpp"

namespace chirpfit {

namespace {

void check_component(const ChirpComponent& a) {
  if (!std::isfinite(a.a_re) || !std::isfinite(a.a_im) ||
      !std::isfinite(a.beta))
    throw DataError("asymptotics: component parameters must be finite");
  if (a.a_re == 0.0 && a.a_im == 0.0)
    throw DataError("asymptotics: amplitude must be nonzero");
}

void check_noise_and_length(double sigma2, std::size_t n) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw DataError("asymptotics: noise variance must be positive and finite");
  if (n == 0) throw DataError("asymptotics: record length must be positive");
}

Mat3 scaled_block(const ChirpComponent& a, double sigma2, std::size_t n) {
  const Mat3 s = sigma_inv_matrix(a);
  const double nd = static_cast<double>(n);
  const double amp_scale = 1.0 / std::sqrt(nd);          // N^{-1/2}
  const double rate_scale = amp_scale / (nd * nd);       // N^{-5/2}
  const std::array<double, 3> d{amp_scale, amp_scale, rate_scale};
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          sigma2 * d[static_cast<std::size_t>(i)] *
          s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
          d[static_cast<std::size_t>(j)];
  return out;
}

}  // namespace

Mat3 sigma_matrix(const ChirpComponent& a) {
  check_component(a);
  const double p = a.a_re, q = a.a_im;
  const double r = p * p + q * q;
  return Mat3{{{2.0, 0.0, -(2.0 / 3.0) * q},
               {0.0, 2.0, (2.0 / 3.0) * p},
               {-(2.0 / 3.0) * q, (2.0 / 3.0) * p, (2.0 / 5.0) * r}}};
}

Mat3 sigma_inv_matrix(const ChirpComponent& a) {
  check_component(a);
  const double p = a.a_re, q = a.a_im;
  const double r = p * p + q * q;
  const double inv8r = 1.0 / (8.0 * r);
  return Mat3{{{(4.0 * r + 5.0 * q * q) * inv8r, -5.0 * p * q * inv8r,
                15.0 * q * inv8r},
               {-5.0 * p * q * inv8r, (4.0 * r + 5.0 * p * p) * inv8r,
                -15.0 * p * inv8r},
               {15.0 * q * inv8r, -15.0 * p * inv8r, 45.0 * inv8r}}};
}

std::array<double, 3> finite_n_variances(const ChirpComponent& a,
                                         double sigma2, std::size_t n) {
  check_noise_and_length(sigma2, n);
  const Mat3 block = scaled_block(a, sigma2, n);
  return {block[0][0], block[1][1], block[2][2]};
}

std::vector<Mat3> multi_covariance(const ChirpModel& model, double sigma2,
                                   std::size_t n) {
  check_noise_and_length(sigma2, n);
  if (model.components.empty())
    throw DataError("asymptotics: model has no components");
  std::vector<Mat3> blocks;
  blocks.reserve(model.components.size());
  for (const ChirpComponent& a : model.components)
    blocks.push_back(scaled_block(a, sigma2, n));
  return blocks;
}

AsymptoticCovariance asymptotic_covariance(const ChirpComponent& a,
                                           double sigma2, std::size_t n) {
  AsymptoticCovariance out;
  out.sigma_inv = sigma_inv_matrix(a);
  out.scaled = finite_n_variances(a, sigma2, n);
  return out;
}

void attach_covariance(FitResult& fit, double sigma2, std::size_t n) {
  check_noise_and_length(sigma2, n);
  if (fit.components.empty())
    throw DataError("asymptotics: fit has no components");
  fit.covariance.clear();
  fit.covariance.reserve(fit.components.size());
  for (const ChirpComponent& a : fit.components)
    fit.covariance.push_back(scaled_block(a, sigma2, n));
}

}  // namespace chirpfit
