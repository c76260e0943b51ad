#pragma once

// Small-grid Wigner diagnostic.  Builds the full 4D Wigner function of a 2D
// wavefunction,
//   W(q, p) = (1/(pi hbar))^2 integral psi*(q+y) psi(q-y) exp(2 i p.y / hbar) dy,
// on the state's grid (periodic wrap in y), and evaluates the gradient-based
// structure measure
//   chi_2q^2 = integral |grad W|^2 / integral W^2
// with spectral derivatives on the periodic 4D grid.  This is the direct
// discretization of the gradient definition, used to validate the pure-state
// variance identity; the 4D cost restricts it to n <= 64.
//
// The Wigner momentum grid is half-spaced relative to the wavefunction's:
// dpw = pi hbar / (n dq), covering [-pi hbar/(2 dq), pi hbar/(2 dq)).

#include "qcc/split_operator.hpp"
#include "qcc/wavefunction.hpp"

#include <fftw3.h>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qcc {

struct WignerDiag {
  int n = 0;
  double dq = 0.0;
  double dpw = 0.0;  // Wigner momentum spacing
  double hbar = 0.0;
  std::vector<double> w;  // [((i1*n + i2)*n + l1)*n + l2]

  double value(int i1, int i2, int l1, int l2) const {
    return w[static_cast<std::size_t>(((i1 * n + i2) * static_cast<long>(n) + l1) * n + l2)];
  }

  double cell_volume() const { return dq * dq * dpw * dpw; }

  double integral() const {
    long double s = 0.0L;
    for (double v : w) s += v;
    return static_cast<double>(s) * cell_volume();
  }

  double min_value() const {
    double m = w.empty() ? 0.0 : w[0];
    for (double v : w) m = std::min(m, v);
    return m;
  }
};

inline WignerDiag build_wigner(const WaveState& state) {
  const int n = state.grid.n;
  if (n > 64) throw std::invalid_argument("build_wigner: refusing n > 64 (4D cost)");

  WignerDiag diag;
  diag.n = n;
  diag.dq = state.grid.dq();
  diag.dpw = M_PI * state.grid.hbar / (n * state.grid.dq());
  diag.hbar = state.grid.hbar;
  diag.w.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);

  detail::FftwBuffer corr(static_cast<std::size_t>(n) * n);
  detail::FftwBuffer out(static_cast<std::size_t>(n) * n);
  // exp(+2 i p.y / hbar) with p_l = pi hbar l / (n dq) is the backward kernel
  detail::FftwPlan plan(n, n, corr.data, out.data, FFTW_BACKWARD);

  const double prefactor = diag.dq * diag.dq / (M_PI * diag.hbar * M_PI * diag.hbar);
  std::complex<double>* c = corr.cplx();
  const std::complex<double>* o = out.cplx();
  // The correlation is windowed to |y| <= L/2: beyond that the periodic wrap
  // pairs the state with its own image and plants an O(1) interference ghost
  // near the box edge.  The true correlation of an interior state has
  // decayed to nothing well before the window.
  const int m_window = n / 4;
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) {
      for (int m1 = 0; m1 < n; ++m1) {
        const int w1 = m1 < n / 2 ? m1 : m1 - n;
        const int a1 = (i1 + m1) & (n - 1);
        const int b1 = (i1 - m1 + n) & (n - 1);
        for (int m2 = 0; m2 < n; ++m2) {
          const int w2 = m2 < n / 2 ? m2 : m2 - n;
          const int a2 = (i2 + m2) & (n - 1);
          const int b2 = (i2 - m2 + n) & (n - 1);
          c[static_cast<std::size_t>(m1) * n + m2] =
              (std::abs(w1) <= m_window && std::abs(w2) <= m_window)
                  ? std::conj(state.at(a1, a2)) * state.at(b1, b2)
                  : 0.0;
        }
      }
      plan.run();
      double* dst = diag.w.data() + (static_cast<std::size_t>(i1) * n + i2) * n * n;
      for (std::size_t k = 0; k < static_cast<std::size_t>(n) * n; ++k)
        dst[k] = prefactor * o[k].real();  // Hermitian correlation: imaginary part is roundoff
    }
  return diag;
}

// Gradient-definition chi_2q on the discrete Wigner grid.
inline double chi2q_spectral_diag(const WaveState& state) {
  const WignerDiag diag = build_wigner(state);
  const int n = diag.n;
  const std::size_t total = diag.w.size();

  detail::FftwBuffer line_in(static_cast<std::size_t>(n));
  detail::FftwBuffer line_out(static_cast<std::size_t>(n));
  fftw_plan fwd = fftw_plan_dft_1d(n, line_in.data, line_out.data, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_plan bwd = fftw_plan_dft_1d(n, line_out.data, line_in.data, FFTW_BACKWARD, FFTW_ESTIMATE);

  // grid periods: 2L in q, n*dpw in p
  const double period_q = n * diag.dq;
  const double period_p = n * diag.dpw;

  long double sum_w2 = 0.0L;
  for (double v : diag.w) sum_w2 += static_cast<long double>(v) * v;

  long double sum_grad2 = 0.0L;
  std::complex<double>* in = line_in.cplx();
  std::complex<double>* out = line_out.cplx();
  const std::size_t stride_of_axis[4] = {static_cast<std::size_t>(n) * n * n,
                                         static_cast<std::size_t>(n) * n, static_cast<std::size_t>(n), 1};
  for (int axis = 0; axis < 4; ++axis) {
    const double period = axis < 2 ? period_q : period_p;
    const std::size_t stride = stride_of_axis[axis];
    const std::size_t n_lines = total / static_cast<std::size_t>(n);
    for (std::size_t line = 0; line < n_lines; ++line) {
      // decompose the line index into the base offset of this 1D slice
      std::size_t rem = line;
      std::size_t base = 0;
      for (int ax = 0; ax < 4; ++ax) {
        if (ax == axis) continue;
        const std::size_t extent = static_cast<std::size_t>(n);
        const std::size_t coord = rem % extent;
        rem /= extent;
        base += coord * stride_of_axis[ax];
      }
      for (int i = 0; i < n; ++i) in[i] = diag.w[base + static_cast<std::size_t>(i) * stride];
      fftw_execute(fwd);
      for (int i = 0; i < n; ++i) {
        // Nyquist mode zeroed: odd-derivative of real data
        const int f = (i == n / 2) ? 0 : (i < n / 2 ? i : i - n);
        const double kappa = 2.0 * M_PI * f / period;
        out[i] *= std::complex<double>(0.0, kappa / n);  // derivative + IFFT normalization
      }
      fftw_execute(bwd);
      for (int i = 0; i < n; ++i) sum_grad2 += static_cast<long double>(std::norm(in[i]));
    }
  }
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(bwd);
  return std::sqrt(static_cast<double>(sum_grad2 / sum_w2));
}

}  // namespace qcc
