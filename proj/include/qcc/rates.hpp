#pragma once

// Finite-time Lyapunov exponents of distribution-function structure and
// their closed-form zero-time limits.
//
//   lambda_2(t) = ln[chi(t) / chi(0)] / t
//
// The t -> 0 limits for a correlated Gaussian initial state, with the
// potential derivatives evaluated at the centroid:
//
//   lambda_2c(0) = tr(H'' J Sigma^{-1}) / tr(Sigma^{-1})
//
// which reduces to the usual shape-parameter form
//   sum_i [hbar r_i / sqrt(1-r_i^2)] (1 - d2V/dqbar_i^2)
//   / sum_i [2 eta_i^2 + hbar^2 / (2 (1-r_i^2) eta_i^2)],
// and the leading quantum correction, proportional to the mixed fourth
// derivative of the potential:
//
//   lambda_2q(0) = lambda_2c(0) - hbar / (8 tr(Sigma^{-1})) * d4V/dq1^2 dq2^2
//                  * [ r2/sqrt(1-r2^2) tr(Sigma_1^{-1})
//                    + r1/sqrt(1-r1^2) tr(Sigma_2^{-1}) ].
//
// The single-mode gradient-norm integrals behind the correction are the
// closed forms from gaussian.hpp, validated against 2D quadrature in the
// test suite.

#include "qcc/core.hpp"
#include "qcc/gaussian.hpp"
#include "qcc/model.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qcc {

// lambda(t) = ln(chi(t)/chi(0))/t for the t > 0 entries of a chi series.
// The first sample must be t = 0 and every chi must be positive.
inline std::vector<double> lambda_series(const std::vector<double>& t, const std::vector<double>& chi) {
  if (t.size() != chi.size() || t.empty())
    throw std::invalid_argument("lambda_series: t and chi must be equal-length, non-empty");
  if (t.front() != 0.0) throw std::invalid_argument("lambda_series: first sample must be t = 0");
  for (double c : chi)
    if (!(c > 0.0)) throw std::invalid_argument("lambda_series: non-positive chi (estimator breakdown)");
  const double log_chi0 = std::log(chi.front());
  std::vector<double> lam(t.size(), 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) lam[i] = (std::log(chi[i]) - log_chi0) / t[i];
  return lam;
}

inline double lambda2c_initial(const GaussianSpec& spec, const ModelParams& params) {
  const Mat4 sigma_inv = covariance_from_spec(spec).inverse();
  const Mat4 h = hessian(params, spec.centroid());
  return (h * symplectic_form() * sigma_inv).trace() / sigma_inv.trace();
}

inline double lambda2q_initial(const GaussianSpec& spec, const ModelParams& params) {
  const double lambda_c = lambda2c_initial(spec, params);
  double v1122 = 0.0;
  if (params.kind == ModelKind::kQuartic) v1122 = 2.0 * params.alpha;
  if (v1122 == 0.0) return lambda_c;

  const Mat2 s1 = mode_covariance(spec.r1, spec.eta1, spec.hbar);
  const Mat2 s2 = mode_covariance(spec.r2, spec.eta2, spec.hbar);
  const double tr1 = s1.inverse().trace();
  const double tr2 = s2.inverse().trace();
  const double shape1 = spec.r1 / std::sqrt(1.0 - spec.r1 * spec.r1);
  const double shape2 = spec.r2 / std::sqrt(1.0 - spec.r2 * spec.r2);
  const double correction =
      spec.hbar / (8.0 * (tr1 + tr2)) * v1122 * (shape2 * tr1 + shape1 * tr2);
  return lambda_c - correction;
}

}  // namespace qcc
