#pragma once

// Hamiltonian family: H = (p1^2 + p2^2)/2 + V(q1, q2) with exact derivatives
// of H up to fourth order, as needed by the flow, tangent and tensor ODEs.
//
//   quartic:        V = (alpha/2) q1^2 q2^2 + (beta/4)(q1^4 + q2^4)
//   quadratic-test: V = (omega1^2/2) q1^2 + (omega2^2/2) q2^2
//
// The quadratic member exists because it has exact closed forms (rotation
// stability matrices, vanishing third/fourth derivatives) used as oracles.

#include "qcc/core.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace qcc {

enum class ModelKind { kQuartic, kQuadraticTest };

struct ModelParams {
  ModelKind kind = ModelKind::kQuartic;
  double alpha = 1.0;   // quartic coupling
  double beta = 0.01;   // quartic stiffness
  double omega1 = 1.0;  // quadratic-test mode frequencies
  double omega2 = 1.0;

  static ModelParams quartic(double alpha, double beta) {
    ModelParams p;
    p.kind = ModelKind::kQuartic;
    p.alpha = alpha;
    p.beta = beta;
    p.validate();
    return p;
  }

  static ModelParams quadratic_test(double omega1, double omega2) {
    ModelParams p;
    p.kind = ModelKind::kQuadraticTest;
    p.omega1 = omega1;
    p.omega2 = omega2;
    p.validate();
    return p;
  }

  void validate() const {
    if (kind == ModelKind::kQuartic) {
      if (!(beta > 0.0)) throw std::invalid_argument("quartic model requires beta > 0");
      if (!(alpha >= 0.0)) throw std::invalid_argument("quartic model requires alpha >= 0");
    } else {
      if (!(omega1 > 0.0) || !(omega2 > 0.0))
        throw std::invalid_argument("quadratic-test model requires omega > 0");
    }
  }
};

template <typename T>
inline T potential(const ModelParams& mp, T q1, T q2) {
  if (mp.kind == ModelKind::kQuartic) {
    const T q1s = q1 * q1;
    const T q2s = q2 * q2;
    return T(0.5) * T(mp.alpha) * q1s * q2s + T(0.25) * T(mp.beta) * (q1s * q1s + q2s * q2s);
  }
  return T(0.5) * (T(mp.omega1 * mp.omega1) * q1 * q1 + T(mp.omega2 * mp.omega2) * q2 * q2);
}

// dV/dq1, dV/dq2
template <typename T>
inline void potential_gradient(const ModelParams& mp, T q1, T q2, T g[2]) {
  if (mp.kind == ModelKind::kQuartic) {
    g[0] = T(mp.alpha) * q1 * q2 * q2 + T(mp.beta) * q1 * q1 * q1;
    g[1] = T(mp.alpha) * q2 * q1 * q1 + T(mp.beta) * q2 * q2 * q2;
  } else {
    g[0] = T(mp.omega1 * mp.omega1) * q1;
    g[1] = T(mp.omega2 * mp.omega2) * q2;
  }
}

// h = {V11, V12, V22}
template <typename T>
inline void potential_hessian(const ModelParams& mp, T q1, T q2, T h[3]) {
  if (mp.kind == ModelKind::kQuartic) {
    h[0] = T(mp.alpha) * q2 * q2 + T(3.0 * mp.beta) * q1 * q1;
    h[1] = T(2.0 * mp.alpha) * q1 * q2;
    h[2] = T(mp.alpha) * q1 * q1 + T(3.0 * mp.beta) * q2 * q2;
  } else {
    h[0] = T(mp.omega1 * mp.omega1);
    h[1] = T(0);
    h[2] = T(mp.omega2 * mp.omega2);
  }
}

inline double energy(const ModelParams& mp, const PhasePoint& x) {
  return 0.5 * (x[2] * x[2] + x[3] * x[3]) + potential(mp, x[0], x[1]);
}

template <typename T>
inline T energy_t(const ModelParams& mp, const T y[4]) {
  return T(0.5) * (y[2] * y[2] + y[3] * y[3]) + potential(mp, y[0], y[1]);
}

// gamma_dot = J dH/dgamma = (p1, p2, -dV/dq1, -dV/dq2)
template <typename T>
inline void flow_field_t(const ModelParams& mp, const T y[4], T dy[4]) {
  T g[2];
  potential_gradient(mp, y[0], y[1], g);
  dy[0] = y[2];
  dy[1] = y[3];
  dy[2] = -g[0];
  dy[3] = -g[1];
}

inline Vec4 flow_field(const ModelParams& mp, const PhasePoint& x) {
  double y[4] = {x[0], x[1], x[2], x[3]};
  double dy[4];
  flow_field_t(mp, y, dy);
  return Vec4(dy[0], dy[1], dy[2], dy[3]);
}

// d2H/dgamma2: position block = Hessian of V, momentum block = identity.
inline Mat4 hessian(const ModelParams& mp, const PhasePoint& x) {
  double h[3];
  potential_hessian(mp, x[0], x[1], h);
  Mat4 m = Mat4::Zero();
  m(0, 0) = h[0];
  m(0, 1) = h[1];
  m(1, 0) = h[1];
  m(1, 1) = h[2];
  m(2, 2) = 1.0;
  m(3, 3) = 1.0;
  return m;
}

// Fully symmetric rank-3 / rank-4 derivative tensors of H; only the position
// block can be nonzero (kinetic energy is quadratic).
template <typename T>
struct Tensor3 {
  std::array<T, 64> a{};
  static constexpr int idx(int i, int j, int k) { return (i * 4 + j) * 4 + k; }
  T operator()(int i, int j, int k) const { return a[idx(i, j, k)]; }
  T& at(int i, int j, int k) { return a[idx(i, j, k)]; }
};

template <typename T>
struct Tensor4 {
  std::array<T, 256> a{};
  static constexpr int idx(int i, int j, int k, int l) { return ((i * 4 + j) * 4 + k) * 4 + l; }
  T operator()(int i, int j, int k, int l) const { return a[idx(i, j, k, l)]; }
  T& at(int i, int j, int k, int l) { return a[idx(i, j, k, l)]; }
};

template <typename T>
inline Tensor3<T> third_derivatives(const ModelParams& mp, T q1, T q2) {
  Tensor3<T> t;
  if (mp.kind != ModelKind::kQuartic) return t;
  // d3V/dq1^3, d3V/dq1^2 dq2, d3V/dq1 dq2^2, d3V/dq2^3
  const T v111 = T(6.0 * mp.beta) * q1;
  const T v112 = T(2.0 * mp.alpha) * q2;
  const T v122 = T(2.0 * mp.alpha) * q1;
  const T v222 = T(6.0 * mp.beta) * q2;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        const int ones = i + j + k;
        T v = (ones == 0) ? v111 : (ones == 1) ? v112 : (ones == 2) ? v122 : v222;
        t.at(i, j, k) = v;
      }
  return t;
}

template <typename T>
inline Tensor4<T> fourth_derivatives(const ModelParams& mp) {
  Tensor4<T> t;
  if (mp.kind != ModelKind::kQuartic) return t;
  const T v1111 = T(6.0 * mp.beta);
  const T v1122 = T(2.0 * mp.alpha);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          const int ones = i + j + k + l;
          T v = (ones == 0 || ones == 4) ? v1111 : (ones == 2) ? v1122 : T(0);
          t.at(i, j, k, l) = v;
        }
  return t;
}

struct HigherDerivatives {
  Tensor3<double> third;
  Tensor4<double> fourth;
};

inline HigherDerivatives higher_derivatives(const ModelParams& mp, const PhasePoint& x) {
  return HigherDerivatives{third_derivatives<double>(mp, x[0], x[1]), fourth_derivatives<double>(mp)};
}

}  // namespace qcc
