#pragma once

// Joint propagation of a trajectory gamma(t) and its stability matrix
// M(t) = d gamma(t) / d gamma(0), with
//   gamma_dot = J dH/dgamma,    M_dot = J d2H/dgamma2 M,   M(0) = 1.
//
// The 20-dimensional system is integrated in extended precision so that the
// symplectic defect ||M^T J M - J|| stays at the 1e-8 level even after the
// entries of M have grown by several orders of magnitude.

#include "qcc/core.hpp"
#include "qcc/model.hpp"
#include "qcc/rk4.hpp"

#include <array>
#include <cmath>
#include <string>

namespace qcc {

namespace detail {

// State layout: y[0..3] = gamma, y[4 + 4*row + col] = M(row, col).
template <typename T>
inline void tangent_rhs(const ModelParams& mp, const T* y, T* dy) {
  flow_field_t(mp, y, dy);
  T h[3];
  potential_hessian(mp, y[0], y[1], h);
  const T* m = y + 4;
  T* dm = dy + 4;
  for (int col = 0; col < 4; ++col) {
    const T mq1 = m[0 * 4 + col];
    const T mq2 = m[1 * 4 + col];
    dm[0 * 4 + col] = m[2 * 4 + col];
    dm[1 * 4 + col] = m[3 * 4 + col];
    dm[2 * 4 + col] = -(h[0] * mq1 + h[1] * mq2);
    dm[3 * 4 + col] = -(h[1] * mq1 + h[2] * mq2);
  }
}

}  // namespace detail

// One ensemble member: initial point, current (gamma, M) and the cached
// weight vector Sigma^{-1} dgamma(0) used by the chi_2c estimator.
struct TangentMember {
  using Scalar = long double;

  Vec4 gamma0 = Vec4::Zero();
  Vec4 weight_vec = Vec4::Zero();
  std::array<Scalar, 20> y{};
  double t = 0.0;
  double energy0 = 0.0;

  static TangentMember start(const ModelParams& mp, const Vec4& gamma0) {
    TangentMember m;
    m.gamma0 = gamma0;
    for (int i = 0; i < 4; ++i) m.y[static_cast<std::size_t>(i)] = gamma0[i];
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m.y[static_cast<std::size_t>(4 + 4 * r + c)] = (r == c) ? 1.0L : 0.0L;
    m.energy0 = energy(mp, gamma0);
    return m;
  }

  Vec4 gamma() const {
    return Vec4(static_cast<double>(y[0]), static_cast<double>(y[1]), static_cast<double>(y[2]),
                static_cast<double>(y[3]));
  }

  Mat4 stability() const {
    Mat4 m;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = static_cast<double>(y[static_cast<std::size_t>(4 + 4 * r + c)]);
    return m;
  }

  double defect() const { return symplectic_defect(stability()); }

  double energy_drift(const ModelParams& mp) const {
    const double e = energy(mp, gamma());
    const double scale = std::max(std::abs(energy0), 1e-300);
    return std::abs(e - energy0) / scale;
  }
};

// Symplectic defect above this level signals that the step size is too
// large for the requested trajectory; the caller must reduce dt.
constexpr double kDefectAbort = 1e-5;

inline void propagate_tangent(const ModelParams& mp, TangentMember& member, double dt, long steps) {
  using T = TangentMember::Scalar;
  const T h = static_cast<T>(dt);
  auto rhs = [&mp](const T* y, T* dy) { detail::tangent_rhs(mp, y, dy); };
  for (long s = 0; s < steps; ++s) rk4_step<20>(member.y.data(), h, rhs);
  member.t += dt * static_cast<double>(steps);
  const double defect = member.defect();
  if (!(defect <= kDefectAbort))  // negated so NaN also aborts
    throw SimulationError("propagate_tangent: symplectic defect " + std::to_string(defect) +
                          " exceeds 1e-5 at t = " + std::to_string(member.t) + "; reduce dt");
}

// Finite-time Lyapunov exponent of a single trajectory,
// (1/t) ln sigma_max(M(gamma0, t)).
inline double trajectory_ftle(const ModelParams& mp, const Vec4& gamma0, double t, double dt = 1e-3) {
  if (!(t > 0.0)) throw std::invalid_argument("trajectory_ftle: t must be > 0");
  TangentMember m = TangentMember::start(mp, gamma0);
  const long steps = std::lround(t / dt);
  const double h = t / static_cast<double>(steps);
  propagate_tangent(mp, m, h, steps);
  Eigen::JacobiSVD<Mat4> svd(m.stability());
  return std::log(svd.singularValues()(0)) / t;
}

}  // namespace qcc
