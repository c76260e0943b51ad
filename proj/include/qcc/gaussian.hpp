#pragma once

// Correlated Gaussian initial states.  The same parameter set describes the
// classical density rho_0 and the Wigner function of the correlated coherent
// state: per mode,
//   Var(q) = eta^2,  Var(p) = hbar^2 / (4 eta^2 (1 - r^2)),
//   Cov(q,p) = hbar r / (2 sqrt(1 - r^2)),
// so each 2x2 mode block has determinant hbar^2/4.

#include "qcc/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qcc {

struct GaussianSpec {
  double r1 = 0.0;
  double r2 = 0.0;
  double eta1 = 1.0;
  double eta2 = 1.0;
  Vec2 qbar = Vec2::Zero();
  Vec2 pbar = Vec2::Zero();
  double hbar = 1.0;

  // Minimum-uncertainty product state: r = 0, eta = sqrt(hbar/2).
  static GaussianSpec coherent(double hbar, const Vec2& qbar, const Vec2& pbar) {
    GaussianSpec s;
    s.hbar = hbar;
    s.eta1 = s.eta2 = std::sqrt(hbar / 2.0);
    s.qbar = qbar;
    s.pbar = pbar;
    s.validate();
    return s;
  }

  static GaussianSpec correlated(double hbar, double r1, double r2, double eta1, double eta2,
                                 const Vec2& qbar, const Vec2& pbar) {
    GaussianSpec s;
    s.hbar = hbar;
    s.r1 = r1;
    s.r2 = r2;
    s.eta1 = eta1;
    s.eta2 = eta2;
    s.qbar = qbar;
    s.pbar = pbar;
    s.validate();
    return s;
  }

  void validate() const {
    // |r| -> 1 makes Var(p) and Cov(q,p) diverge; keep the covariance
    // well conditioned.
    if (std::abs(r1) > 0.99 || std::abs(r2) > 0.99)
      throw std::invalid_argument("GaussianSpec: |r| > 0.99 rejected");
    if (!(eta1 > 0.0) || !(eta2 > 0.0)) throw std::invalid_argument("GaussianSpec: eta must be > 0");
    if (!(hbar > 0.0)) throw std::invalid_argument("GaussianSpec: hbar must be > 0");
  }

  double r(int mode) const { return mode == 0 ? r1 : r2; }
  double eta(int mode) const { return mode == 0 ? eta1 : eta2; }

  Vec4 centroid() const { return Vec4(qbar[0], qbar[1], pbar[0], pbar[1]); }

  GaussianSpec swapped_modes() const {
    GaussianSpec s = *this;
    std::swap(s.r1, s.r2);
    std::swap(s.eta1, s.eta2);
    std::swap(s.qbar[0], s.qbar[1]);
    std::swap(s.pbar[0], s.pbar[1]);
    return s;
  }
};

inline Mat2 mode_covariance(double r, double eta, double hbar) {
  const double one_minus = 1.0 - r * r;
  Mat2 c;
  c(0, 0) = eta * eta;
  c(0, 1) = c(1, 0) = hbar * r / (2.0 * std::sqrt(one_minus));
  c(1, 1) = hbar * hbar / (4.0 * eta * eta * one_minus);
  return c;
}

// 4x4 covariance in (q1, q2, p1, p2) ordering; mode i couples indices
// {i, i+2}.  Each mode block has det = hbar^2/4 identically.
inline Mat4 covariance_from_spec(const GaussianSpec& spec) {
  spec.validate();
  Mat4 sigma = Mat4::Zero();
  for (int m = 0; m < 2; ++m) {
    const Mat2 block = mode_covariance(spec.r(m), spec.eta(m), spec.hbar);
    sigma(m, m) = block(0, 0);
    sigma(m, m + 2) = sigma(m + 2, m) = block(0, 1);
    sigma(m + 2, m + 2) = block(1, 1);
  }
  Eigen::LLT<Mat4> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("covariance_from_spec: result not positive definite");
  return sigma;
}

// chi_2^2 of a Gaussian phase-space density with covariance S:
// integral |grad rho|^2 / integral rho^2 = tr(S^{-1}) / 2.
inline double chi2_sq_of_covariance(const Mat4& sigma) {
  return 0.5 * sigma.inverse().trace();
}

inline double chi2c_sq_initial(const GaussianSpec& spec) {
  return chi2_sq_of_covariance(covariance_from_spec(spec));
}

// Evolved covariance under a phase-point-independent stability matrix
// (exact for linear dynamics).
inline Mat4 evolved_covariance(const Mat4& stability, const Mat4& sigma0) {
  return stability * sigma0 * stability.transpose();
}

// Single-mode Gaussian integrals used by the short-time rate formulas:
//   integral rho^2 dq dp          = 1 / (4 pi sqrt(det S))
//   integral |grad rho|^2 dq dp   = tr(S^{-1}) / (8 pi sqrt(det S))
inline double mode_density_sq_integral(const Mat2& s) {
  return 1.0 / (4.0 * M_PI * std::sqrt(s.determinant()));
}

inline double mode_grad_norm_integral(const Mat2& s) {
  return s.inverse().trace() / (8.0 * M_PI * std::sqrt(s.determinant()));
}

}  // namespace qcc
