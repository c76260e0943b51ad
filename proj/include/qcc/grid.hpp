#pragma once

// Position grid for wavefunction propagation.  The box is [-L, L) per axis
// with n points (n a power of two), dq = 2L/n.  Momenta follow the discrete
// transform convention p = hbar k with k the standard wavenumbers for
// spacing dq, so the momentum grid spacing is dp = pi hbar / L and the
// Nyquist momentum is pi hbar / dq.

#include <cmath>
#include <stdexcept>
#include <string>

namespace qcc {

struct GridSpec {
  int n = 512;
  double half_width = 6.0;
  double hbar = 0.05;

  void validate() const {
    if (n < 16 || (n & (n - 1)) != 0)
      throw std::invalid_argument("GridSpec: n must be a power of two >= 16");
    if (!(half_width > 0.0)) throw std::invalid_argument("GridSpec: half width must be > 0");
    if (!(hbar > 0.0)) throw std::invalid_argument("GridSpec: hbar must be > 0");
  }

  double dq() const { return 2.0 * half_width / n; }
  double dp() const { return M_PI * hbar / half_width; }
  double position(int i) const { return -half_width + i * dq(); }

  // index -> signed wavenumber integer (standard FFT wrap)
  int wrap(int i) const { return i < n / 2 ? i : i - n; }
  double wavenumber(int i) const { return M_PI * wrap(i) / half_width; }
  double momentum(int i) const { return hbar * wavenumber(i); }
};

}  // namespace qcc
