#pragma once

// Wavefunctions on the 2D position grid and the correlated coherent state.
//
// Per mode the initial state is
//   phi(x) = (2 pi eta^2)^{-1/4}
//            exp[ -(1 - i r / sqrt(1-r^2)) (x - qbar)^2 / (4 eta^2)
//                 + i pbar (x - qbar) / hbar ],
// which realizes the moments Var(q) = eta^2, Var(p) = hbar^2/(4 eta^2 (1-r^2)),
// Cov(q,p) = hbar r / (2 sqrt(1-r^2)); at r = 0 it is the minimum-uncertainty
// coherent state.

#include "qcc/core.hpp"
#include "qcc/gaussian.hpp"
#include "qcc/grid.hpp"

#include <complex>
#include <string>
#include <vector>

namespace qcc {

struct WaveState {
  GridSpec grid;
  std::vector<std::complex<double>> amp;  // row-major, index i1 * n + i2
  double t = 0.0;

  std::complex<double>& at(int i1, int i2) { return amp[static_cast<std::size_t>(i1) * grid.n + i2]; }
  const std::complex<double>& at(int i1, int i2) const {
    return amp[static_cast<std::size_t>(i1) * grid.n + i2];
  }

  double norm_sq() const {
    long double s = 0.0L;
    for (const auto& a : amp) s += std::norm(a);
    return static_cast<double>(s) * grid.dq() * grid.dq();
  }

  // |psi|^2 mass in the outermost two grid cells per edge
  double boundary_mass() const {
    const int n = grid.n;
    long double s = 0.0L;
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2)
        if (i1 < 2 || i1 >= n - 2 || i2 < 2 || i2 >= n - 2) s += std::norm(at(i1, i2));
    return static_cast<double>(s) * grid.dq() * grid.dq();
  }

  void normalize() {
    const double scale = 1.0 / std::sqrt(norm_sq());
    for (auto& a : amp) a *= scale;
  }
};

constexpr double kBoundaryMassLimit = 1e-10;

inline WaveState init_correlated_coherent(const GridSpec& grid, const GaussianSpec& spec) {
  grid.validate();
  spec.validate();
  if (grid.hbar != spec.hbar)
    throw std::invalid_argument("init_correlated_coherent: grid and state disagree on hbar");

  for (int m = 0; m < 2; ++m) {
    const double eta = spec.eta(m);
    const double sigma_p = spec.hbar / (2.0 * eta * std::sqrt(1.0 - spec.r(m) * spec.r(m)));
    if (eta < 4.0 * grid.dq())
      throw std::invalid_argument("init_correlated_coherent: position width of mode " +
                                  std::to_string(m + 1) + " is under-resolved (eta < 4 dq)");
    if (sigma_p < 4.0 * grid.dp())
      throw std::invalid_argument("init_correlated_coherent: momentum width of mode " +
                                  std::to_string(m + 1) + " is under-resolved (sigma_p < 4 dp)");
  }

  const int n = grid.n;
  std::vector<std::vector<std::complex<double>>> mode(2);
  for (int m = 0; m < 2; ++m) {
    const double r = spec.r(m);
    const double eta = spec.eta(m);
    const std::complex<double> shape(1.0, -r / std::sqrt(1.0 - r * r));
    const double qb = spec.qbar[m];
    const double pb = spec.pbar[m];
    auto& phi = mode[m];
    phi.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double x = grid.position(i) - qb;
      const std::complex<double> arg =
          -shape * (x * x / (4.0 * eta * eta)) + std::complex<double>(0.0, pb * x / spec.hbar);
      phi[static_cast<std::size_t>(i)] = std::exp(arg);
    }
  }

  WaveState state;
  state.grid = grid;
  state.amp.resize(static_cast<std::size_t>(n) * n);
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2)
      state.at(i1, i2) = mode[0][static_cast<std::size_t>(i1)] * mode[1][static_cast<std::size_t>(i2)];
  state.normalize();

  const double edge = state.boundary_mass();
  if (!(edge < kBoundaryMassLimit))
    throw SimulationError("init_correlated_coherent: boundary mass " + std::to_string(edge) +
                          " exceeds 1e-10; box too small");
  return state;
}

// |<a|b>| on a common grid
inline double overlap_magnitude(const WaveState& a, const WaveState& b) {
  if (a.grid.n != b.grid.n) throw std::invalid_argument("overlap: grid mismatch");
  std::complex<long double> s = 0.0L;
  for (std::size_t i = 0; i < a.amp.size(); ++i)
    s += std::conj(std::complex<long double>(a.amp[i])) * std::complex<long double>(b.amp[i]);
  return static_cast<double>(std::abs(s)) * a.grid.dq() * a.grid.dq();
}

}  // namespace qcc
