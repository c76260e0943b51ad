#pragma once

// Classical fixed-step RK4 for small autonomous systems stored as flat
// arrays.  One shared integrator serves the trajectory, tangent and
// stability-tensor ODEs; accuracy is enforced by the symplectic-defect and
// energy-drift monitors of the callers.

#include <array>
#include <cstddef>

namespace qcc {

// rhs(const T* y, T* dy) must fill dy[0..N).
template <std::size_t N, typename T, typename Rhs>
inline void rk4_step(T* y, T dt, Rhs&& rhs) {
  T k1[N], k2[N], k3[N], k4[N], tmp[N];
  rhs(y, k1);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + T(0.5) * dt * k1[i];
  rhs(tmp, k2);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + T(0.5) * dt * k2[i];
  rhs(tmp, k3);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + dt * k3[i];
  rhs(tmp, k4);
  const T w = dt / T(6);
  for (std::size_t i = 0; i < N; ++i) y[i] += w * (k1[i] + T(2) * (k2[i] + k3[i]) + k4[i]);
}

template <std::size_t N, typename T, typename Rhs>
inline void rk4_step(std::array<T, N>& y, T dt, Rhs&& rhs) {
  rk4_step<N>(y.data(), dt, static_cast<Rhs&&>(rhs));
}

}  // namespace qcc
