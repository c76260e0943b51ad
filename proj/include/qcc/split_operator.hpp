#pragma once

// Strang split-operator propagation of psi(q1, q2):
//   psi <- exp(-i dt V / 2 hbar) psi          (position space)
//   psi <- IFFT exp(-i dt p^2 / 2 hbar) FFT psi
//   psi <- exp(-i dt V / 2 hbar) psi
//
// Plans use FFTW_ESTIMATE so that repeated runs of the same configuration
// are bit-identical (measured plans would pick timing-dependent algorithms).

#include "qcc/grid.hpp"
#include "qcc/model.hpp"
#include "qcc/wavefunction.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcc {

namespace detail {

struct FftwBuffer {
  fftw_complex* data = nullptr;
  explicit FftwBuffer(std::size_t n) {
    data = fftw_alloc_complex(n);
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  std::complex<double>* cplx() { return reinterpret_cast<std::complex<double>*>(data); }
  const std::complex<double>* cplx() const { return reinterpret_cast<const std::complex<double>*>(data); }
};

struct FftwPlan {
  fftw_plan plan = nullptr;
  FftwPlan() = default;
  FftwPlan(int n0, int n1, fftw_complex* in, fftw_complex* out, int sign) {
    plan = fftw_plan_dft_2d(n0, n1, in, out, sign, FFTW_ESTIMATE);
    if (!plan) throw std::runtime_error("fftw plan creation failed");
  }
  ~FftwPlan() {
    if (plan) fftw_destroy_plan(plan);
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
  FftwPlan(FftwPlan&& o) noexcept : plan(o.plan) { o.plan = nullptr; }
  FftwPlan& operator=(FftwPlan&& o) noexcept {
    std::swap(plan, o.plan);
    return *this;
  }
  void run() const { fftw_execute(plan); }
};

}  // namespace detail

struct QuantumMoments {
  std::array<double, 4> mean{};      // <q1>, <q2>, <p1>, <p2>
  std::array<double, 4> variance{};  // Var(q1), Var(q2), Var(p1), Var(p2)
};

class SplitOperator {
 public:
  SplitOperator(const GridSpec& grid, const ModelParams& params, double dt)
      : grid_(grid),
        params_(params),
        size_(static_cast<std::size_t>(grid.n) * static_cast<std::size_t>(grid.n)),
        psi_(size_),
        spec_(size_),
        fwd_(grid.n, grid.n, psi_.data, spec_.data, FFTW_FORWARD),
        bwd_(grid.n, grid.n, spec_.data, psi_.data, FFTW_BACKWARD) {
    grid_.validate();
    params_.validate();
    build_potential_table();
    set_dt(dt);
  }

  const GridSpec& grid() const { return grid_; }
  double dt() const { return dt_; }
  double time() const { return t_; }

  void set_dt(double dt) {
    if (dt == 0.0) throw std::invalid_argument("SplitOperator: dt must be nonzero");
    dt_ = dt;
    const int n = grid_.n;
    half_pot_.resize(size_);
    for (std::size_t i = 0; i < size_; ++i) {
      const double phase = -0.5 * dt_ * pot_value_[i] / grid_.hbar;
      half_pot_[i] = std::polar(1.0, phase);
    }
    kin_.resize(size_);
    const double scale = 1.0 / static_cast<double>(size_);  // folds in the IFFT normalization
    for (int j1 = 0; j1 < n; ++j1) {
      const double p1 = grid_.momentum(j1);
      for (int j2 = 0; j2 < n; ++j2) {
        const double p2 = grid_.momentum(j2);
        const double phase = -dt_ * (p1 * p1 + p2 * p2) / (2.0 * grid_.hbar);
        kin_[static_cast<std::size_t>(j1) * n + j2] = std::polar(scale, phase);
      }
    }
  }

  void load(const WaveState& state) {
    if (state.grid.n != grid_.n || state.grid.half_width != grid_.half_width ||
        state.grid.hbar != grid_.hbar)
      throw std::invalid_argument("SplitOperator::load: grid mismatch");
    std::copy(state.amp.begin(), state.amp.end(), psi_.cplx());
    t_ = state.t;
  }

  WaveState snapshot() const {
    WaveState s;
    s.grid = grid_;
    s.amp.assign(psi_.cplx(), psi_.cplx() + size_);
    s.t = t_;
    return s;
  }

  void advance(long steps) {
    std::complex<double>* psi = psi_.cplx();
    std::complex<double>* spec = spec_.cplx();
    for (long s = 0; s < steps; ++s) {
      for (std::size_t i = 0; i < size_; ++i) psi[i] *= half_pot_[i];
      fwd_.run();
      for (std::size_t i = 0; i < size_; ++i) spec[i] *= kin_[i];
      bwd_.run();
      for (std::size_t i = 0; i < size_; ++i) psi[i] *= half_pot_[i];
    }
    t_ += dt_ * static_cast<double>(steps);
    check_invariants();
  }

  // kinetic-only evolution (the V = 0 limit); preserves the spectral density
  void advance_kinetic(long steps) {
    std::complex<double>* spec = spec_.cplx();
    for (long s = 0; s < steps; ++s) {
      fwd_.run();
      for (std::size_t i = 0; i < size_; ++i) spec[i] *= kin_[i];
      bwd_.run();
    }
    t_ += dt_ * static_cast<double>(steps);
    check_invariants();
  }

  double norm_sq() const {
    long double s = 0.0L;
    const std::complex<double>* psi = psi_.cplx();
    for (std::size_t i = 0; i < size_; ++i) s += std::norm(psi[i]);
    return static_cast<double>(s) * grid_.dq() * grid_.dq();
  }

  double boundary_mass() const {
    const int n = grid_.n;
    const std::complex<double>* psi = psi_.cplx();
    long double s = 0.0L;
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2)
        if (i1 < 2 || i1 >= n - 2 || i2 < 2 || i2 >= n - 2)
          s += std::norm(psi[static_cast<std::size_t>(i1) * n + i2]);
    return static_cast<double>(s) * grid_.dq() * grid_.dq();
  }

  // Position moments from |psi(q)|^2, momentum moments from the spectral
  // density |psi(p)|^2 in the p = hbar k convention.
  QuantumMoments moments() {
    const int n = grid_.n;
    const std::complex<double>* psi = psi_.cplx();
    QuantumMoments m;
    long double wsum = 0.0L, s1 = 0.0L, s2 = 0.0L, s11 = 0.0L, s22 = 0.0L;
    for (int i1 = 0; i1 < n; ++i1) {
      const double q1 = grid_.position(i1);
      long double row = 0.0L, row_q2 = 0.0L, row_q22 = 0.0L;
      for (int i2 = 0; i2 < n; ++i2) {
        const double w = std::norm(psi[static_cast<std::size_t>(i1) * n + i2]);
        const double q2 = grid_.position(i2);
        row += w;
        row_q2 += w * q2;
        row_q22 += w * q2 * q2;
      }
      wsum += row;
      s1 += row * q1;
      s11 += row * q1 * q1;
      s2 += row_q2;
      s22 += row_q22;
    }
    m.mean[0] = static_cast<double>(s1 / wsum);
    m.mean[1] = static_cast<double>(s2 / wsum);
    m.variance[0] = static_cast<double>(s11 / wsum) - m.mean[0] * m.mean[0];
    m.variance[1] = static_cast<double>(s22 / wsum) - m.mean[1] * m.mean[1];

    fwd_.run();
    const std::complex<double>* spec = spec_.cplx();
    wsum = s1 = s2 = s11 = s22 = 0.0L;
    for (int j1 = 0; j1 < n; ++j1) {
      const double p1 = grid_.momentum(j1);
      long double row = 0.0L, row_p2 = 0.0L, row_p22 = 0.0L;
      for (int j2 = 0; j2 < n; ++j2) {
        const double w = std::norm(spec[static_cast<std::size_t>(j1) * n + j2]);
        const double p2 = grid_.momentum(j2);
        row += w;
        row_p2 += w * p2;
        row_p22 += w * p2 * p2;
      }
      wsum += row;
      s1 += row * p1;
      s11 += row * p1 * p1;
      s2 += row_p2;
      s22 += row_p22;
    }
    m.mean[2] = static_cast<double>(s1 / wsum);
    m.mean[3] = static_cast<double>(s2 / wsum);
    m.variance[2] = static_cast<double>(s11 / wsum) - m.mean[2] * m.mean[2];
    m.variance[3] = static_cast<double>(s22 / wsum) - m.mean[3] * m.mean[3];
    return m;
  }

  // chi_2q from the pure-state identity chi^2 = (2/hbar^2) sum_i Var(gamma_i)
  double chi2q() { return chi2q_from_moments(moments(), grid_.hbar); }

  static double chi2q_from_moments(const QuantumMoments& m, double hbar) {
    double s = 0.0;
    for (double v : m.variance) s += v;
    return std::sqrt(2.0 * s / (hbar * hbar));
  }

  double energy() {
    const std::complex<double>* psi = psi_.cplx();
    long double vsum = 0.0L, wsum = 0.0L;
    for (std::size_t i = 0; i < size_; ++i) {
      const double w = std::norm(psi[i]);
      vsum += w * pot_value_[i];
      wsum += w;
    }
    fwd_.run();
    const std::complex<double>* spec = spec_.cplx();
    const int n = grid_.n;
    long double tsum = 0.0L, tw = 0.0L;
    for (int j1 = 0; j1 < n; ++j1) {
      const double p1 = grid_.momentum(j1);
      for (int j2 = 0; j2 < n; ++j2) {
        const double p2 = grid_.momentum(j2);
        const double w = std::norm(spec[static_cast<std::size_t>(j1) * n + j2]);
        tsum += w * 0.5 * (p1 * p1 + p2 * p2);
        tw += w;
      }
    }
    return static_cast<double>(vsum / wsum) + static_cast<double>(tsum / tw);
  }

 private:
  void build_potential_table() {
    const int n = grid_.n;
    pot_value_.resize(size_);
    for (int i1 = 0; i1 < n; ++i1) {
      const double q1 = grid_.position(i1);
      for (int i2 = 0; i2 < n; ++i2)
        pot_value_[static_cast<std::size_t>(i1) * n + i2] = potential(params_, q1, grid_.position(i2));
    }
  }

  void check_invariants() const {
    const double nrm = norm_sq();
    if (!(std::abs(nrm - 1.0) < 1e-10))
      throw SimulationError("SplitOperator: norm drifted to " + std::to_string(nrm) + " at t = " +
                            std::to_string(t_));
    const double edge = boundary_mass();
    if (!(edge < kBoundaryMassLimit))
      throw SimulationError("SplitOperator: boundary mass " + std::to_string(edge) +
                            " exceeds 1e-10 at t = " + std::to_string(t_) + "; box too small");
  }

  GridSpec grid_;
  ModelParams params_;
  std::size_t size_;
  detail::FftwBuffer psi_;
  detail::FftwBuffer spec_;
  detail::FftwPlan fwd_;
  detail::FftwPlan bwd_;
  std::vector<double> pot_value_;
  std::vector<std::complex<double>> half_pot_;
  std::vector<std::complex<double>> kin_;
  double dt_ = 1e-3;
  double t_ = 0.0;
};

// Spec-level convenience: one-shot chi_2q of a wave state.
inline double chi2q_variance(const WaveState& state) {
  SplitOperator prop(state.grid, ModelParams::quartic(0.0, 1.0), 1e-3);
  prop.load(state);
  return prop.chi2q();
}

inline QuantumMoments quantum_moments(const WaveState& state) {
  SplitOperator prop(state.grid, ModelParams::quartic(0.0, 1.0), 1e-3);
  prop.load(state);
  return prop.moments();
}

}  // namespace qcc
