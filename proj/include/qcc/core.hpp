#pragma once

// Shared phase-space conventions for the two-degree-of-freedom simulator.
//
// A phase point is gamma = (q1, q2, p1, p2), stored as a dense 4-vector.
// The symplectic form J is the block matrix [[0, I], [-I, 0]] in that
// ordering, so Hamilton's equations read gamma_dot = J dH/dgamma.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qcc {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;

// (q1, q2, p1, p2), dimensionless scaled variables.
using PhasePoint = Vec4;

// Raised when a runtime invariant of a simulation is violated (boundary
// mass, symplectic defect, estimator breakdown, ...).  Configuration and
// precondition errors use std::invalid_argument instead.
class SimulationError : public std::runtime_error {
 public:
  explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

inline const Mat4& symplectic_form() {
  static const Mat4 j = [] {
    Mat4 m = Mat4::Zero();
    m(0, 2) = 1.0;
    m(1, 3) = 1.0;
    m(2, 0) = -1.0;
    m(3, 1) = -1.0;
    return m;
  }();
  return j;
}

// y_out = J y, for any scalar type.
template <typename T>
inline void apply_symplectic(const T y[4], T out[4]) {
  out[0] = y[2];
  out[1] = y[3];
  out[2] = -y[0];
  out[3] = -y[1];
}

// Row k of J has a single nonzero entry J(k, col) = sign.
constexpr int symplectic_col(int k) { return k < 2 ? k + 2 : k - 2; }
constexpr double symplectic_sign(int k) { return k < 2 ? 1.0 : -1.0; }

inline double symplectic_defect(const Mat4& m) {
  const Mat4& j = symplectic_form();
  return (m.transpose() * j * m - j).norm();
}

// Fixed chunk width for ensemble reductions.  Partial sums are always formed
// per chunk and merged in chunk order, so results are identical for any
// worker count.
constexpr std::int64_t kReductionChunk = 4096;

}  // namespace qcc
