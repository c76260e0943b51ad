#pragma once
#include <limits>

// Monte-Carlo Liouville ensembles.
//
// chi_2c(t)^2 = E_{rho0^2} [ | J M(gamma, t) J Sigma^{-1} dgamma(0) |^2 ]:
// the gradient-overlap integral reduces to a plain ensemble average once the
// members are drawn from the normalized square of the initial Gaussian
// (again a Gaussian, with half the covariance).  J is orthogonal, so the
// outer factor drops out of the norm and each member contributes
// w = | M J Sigma^{-1} dgamma(0) |^2.
//
// Reductions are chunked with a fixed chunk width and merged in chunk order;
// results are bit-identical for any worker count.

#include "qcc/core.hpp"
#include "qcc/gaussian.hpp"
#include "qcc/model.hpp"
#include "qcc/rng.hpp"
#include "qcc/tangent.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

namespace qcc {

enum class SampleLaw {
  kDensity,         // draw from rho_0 = N(centroid, Sigma)
  kDensitySquared,  // draw from rho_0^2 / ||rho_0^2|| = N(centroid, Sigma/2)
};

struct EnsembleRunConfig {
  std::int64_t n_samples = 100000;
  std::uint64_t seed = 1;
  double dt = 1e-3;
  double t_max = 4.0;
  int output_stride = 50;  // steps between records
  int workers = 0;         // 0 = hardware concurrency

  void validate() const {
    if (n_samples < 1) throw std::invalid_argument("EnsembleRunConfig: nSamples >= 1 required");
    if (!(dt > 0.0)) throw std::invalid_argument("EnsembleRunConfig: dt > 0 required");
    if (t_max < 0.0) throw std::invalid_argument("EnsembleRunConfig: tMax >= 0 required");
    if (output_stride < 1) throw std::invalid_argument("EnsembleRunConfig: outputStride >= 1 required");
    const long steps = std::lround(t_max / dt);
    if (std::abs(static_cast<double>(steps) * dt - t_max) > 1e-9)
      throw std::invalid_argument("EnsembleRunConfig: tMax must be an integer number of steps");
    if (steps % output_stride != 0)
      throw std::invalid_argument("EnsembleRunConfig: step count not a multiple of outputStride");
  }

  long n_steps() const { return std::lround(t_max / dt); }
  long n_records() const { return n_steps() / output_stride + 1; }
  int resolved_workers() const {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }
};

namespace detail {

struct ModeChol {
  double l11, l21, l22;  // lower Cholesky factor of one 2x2 mode block
};

inline ModeChol mode_cholesky(const Mat2& c) {
  ModeChol f;
  f.l11 = std::sqrt(c(0, 0));
  f.l21 = c(0, 1) / f.l11;
  f.l22 = std::sqrt(c(1, 1) - f.l21 * f.l21);
  return f;
}

struct Sampler {
  ModeChol chol[2];
  Mat4 sigma_inv;
  Vec4 centroid;

  Sampler(const GaussianSpec& spec, SampleLaw law) {
    const Mat4 sigma = covariance_from_spec(spec);
    const double scale = (law == SampleLaw::kDensitySquared) ? 0.5 : 1.0;
    for (int m = 0; m < 2; ++m) {
      Mat2 block;
      block << sigma(m, m), sigma(m, m + 2), sigma(m + 2, m), sigma(m + 2, m + 2);
      chol[m] = mode_cholesky(block * scale);
    }
    sigma_inv = sigma.inverse();
    centroid = spec.centroid();
  }

  // Draws member `index`; returns the phase point and fills the deviation.
  Vec4 draw(std::uint64_t seed, std::int64_t index, Vec4* deviation = nullptr) const {
    SplitMix64 rng(seed, static_cast<std::uint64_t>(index));
    double z[4];
    rng.normal_pair(z[0], z[1]);
    rng.normal_pair(z[2], z[3]);
    Vec4 d;
    for (int m = 0; m < 2; ++m) {
      d[m] = chol[m].l11 * z[2 * m];
      d[m + 2] = chol[m].l21 * z[2 * m] + chol[m].l22 * z[2 * m + 1];
    }
    if (deviation) *deviation = d;
    return centroid + d;
  }
};

// w = | M J v |^2 evaluated in the member's extended-precision state.
inline double chi_weight(const TangentMember& member) {
  using T = TangentMember::Scalar;
  T u[4];
  const Vec4& v = member.weight_vec;
  u[0] = static_cast<T>(v[2]);
  u[1] = static_cast<T>(v[3]);
  u[2] = static_cast<T>(-v[0]);
  u[3] = static_cast<T>(-v[1]);
  T w = 0.0L;
  for (int r = 0; r < 4; ++r) {
    T s = 0.0L;
    for (int c = 0; c < 4; ++c) s += member.y[static_cast<std::size_t>(4 + 4 * r + c)] * u[c];
    w += s * s;
  }
  return static_cast<double>(w);
}

// Runs fn(chunk_begin, chunk_end, chunk_index) over fixed chunks on the
// requested number of workers.
template <typename Fn>
inline void for_each_chunk(std::int64_t n, int workers, Fn&& fn) {
  const std::int64_t n_chunks = (n + kReductionChunk - 1) / kReductionChunk;
  std::atomic<std::int64_t> next{0};
  auto run = [&] {
    for (;;) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= n_chunks) break;
      const std::int64_t lo = c * kReductionChunk;
      const std::int64_t hi = std::min(n, lo + kReductionChunk);
      fn(lo, hi, c);
    }
  };
  if (workers <= 1 || n_chunks <= 1) {
    run();
    return;
  }
  std::vector<std::thread> pool;
  const int k = static_cast<int>(std::min<std::int64_t>(workers, n_chunks));
  pool.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) pool.emplace_back(run);
  for (auto& th : pool) th.join();
}

}  // namespace detail

// Deterministic Gaussian sample of n phase points.
inline std::vector<PhasePoint> sample_initial(const GaussianSpec& spec, std::int64_t n,
                                              std::uint64_t seed, SampleLaw law) {
  if (n < 1) throw std::invalid_argument("sample_initial: n >= 1 required");
  const detail::Sampler sampler(spec, law);
  std::vector<PhasePoint> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) out.push_back(sampler.draw(seed, i));
  return out;
}

// Materializes tangent members for the chi_2c estimator (density-squared law,
// weight vectors cached).
inline std::vector<TangentMember> make_chi_members(const ModelParams& params, const GaussianSpec& spec,
                                                   std::int64_t n, std::uint64_t seed) {
  const detail::Sampler sampler(spec, SampleLaw::kDensitySquared);
  std::vector<TangentMember> members;
  members.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    Vec4 dev;
    const Vec4 gamma0 = sampler.draw(seed, i, &dev);
    TangentMember m = TangentMember::start(params, gamma0);
    m.weight_vec = sampler.sigma_inv * dev;
    members.push_back(m);
  }
  return members;
}

struct ChiEstimate {
  double chi = 0.0;
  double std_error = 0.0;
};

// Monte-Carlo estimate of chi_2c with a delta-method standard error.
inline ChiEstimate chi2c_estimate(const std::vector<TangentMember>& members) {
  const std::int64_t n = static_cast<std::int64_t>(members.size());
  if (n < 100)
    throw std::invalid_argument("chi2c_estimate: fewer than 100 members, standard error meaningless");
  const std::int64_t n_chunks = (n + kReductionChunk - 1) / kReductionChunk;
  long double sum_w = 0.0L, sum_w2 = 0.0L;
  for (std::int64_t c = 0; c < n_chunks; ++c) {
    long double s = 0.0L, s2 = 0.0L;
    const std::int64_t hi = std::min(n, (c + 1) * kReductionChunk);
    for (std::int64_t i = c * kReductionChunk; i < hi; ++i) {
      const double w = detail::chi_weight(members[static_cast<std::size_t>(i)]);
      s += w;
      s2 += static_cast<long double>(w) * w;
    }
    sum_w += s;
    sum_w2 += s2;
  }
  const double mean = static_cast<double>(sum_w / static_cast<long double>(n));
  const double var =
      std::max(0.0, static_cast<double>(sum_w2 / static_cast<long double>(n)) - mean * mean);
  ChiEstimate e;
  e.chi = std::sqrt(mean);
  e.std_error = e.chi > 0.0 ? std::sqrt(var / static_cast<double>(n)) / (2.0 * e.chi) : 0.0;
  return e;
}

struct ClassicalMoments {
  std::array<double, 4> mean{};
  std::array<double, 4> variance{};
};

// Per-coordinate sample mean and unbiased variance of the current gamma.
inline ClassicalMoments classical_moments(const std::vector<TangentMember>& members) {
  const std::int64_t n = static_cast<std::int64_t>(members.size());
  if (n < 100) throw std::invalid_argument("classical_moments: fewer than 100 members");
  const std::int64_t n_chunks = (n + kReductionChunk - 1) / kReductionChunk;
  long double sum[4] = {0, 0, 0, 0}, sum2[4] = {0, 0, 0, 0};
  for (std::int64_t c = 0; c < n_chunks; ++c) {
    long double s[4] = {0, 0, 0, 0}, s2[4] = {0, 0, 0, 0};
    const std::int64_t hi = std::min(n, (c + 1) * kReductionChunk);
    for (std::int64_t i = c * kReductionChunk; i < hi; ++i) {
      for (int j = 0; j < 4; ++j) {
        const long double v = members[static_cast<std::size_t>(i)].y[static_cast<std::size_t>(j)];
        s[j] += v;
        s2[j] += v * v;
      }
    }
    for (int j = 0; j < 4; ++j) {
      sum[j] += s[j];
      sum2[j] += s2[j];
    }
  }
  ClassicalMoments m;
  for (int j = 0; j < 4; ++j) {
    const long double mean = sum[j] / static_cast<long double>(n);
    m.mean[static_cast<std::size_t>(j)] = static_cast<double>(mean);
    m.variance[static_cast<std::size_t>(j)] = static_cast<double>(
        (sum2[j] - static_cast<long double>(n) * mean * mean) / static_cast<long double>(n - 1));
  }
  return m;
}

struct EnsembleStats {
  double max_defect = 0.0;
  double max_energy_drift_rate = 0.0;  // relative drift per unit time
};

struct ChiSeries {
  std::vector<double> t;
  std::vector<double> chi;
  std::vector<double> std_error;
  EnsembleStats stats;
};

struct MomentSeries {
  std::vector<double> t;
  std::vector<std::array<double, 4>> mean;
  std::vector<std::array<double, 4>> variance;
  EnsembleStats stats;
};

// Full chi_2c(t) run: members are streamed chunk by chunk through all output
// records, so memory stays O(chunk), and each record's sums are merged in
// chunk order.
inline ChiSeries run_chi_ensemble(const ModelParams& params, const GaussianSpec& spec,
                                  const EnsembleRunConfig& cfg) {
  cfg.validate();
  const detail::Sampler sampler(spec, SampleLaw::kDensitySquared);
  const long n_records = cfg.n_records();
  const std::int64_t n = cfg.n_samples;
  const std::int64_t n_chunks = (n + kReductionChunk - 1) / kReductionChunk;

  std::vector<long double> sum_w(static_cast<std::size_t>(n_chunks * n_records), 0.0L);
  std::vector<long double> sum_w2(static_cast<std::size_t>(n_chunks * n_records), 0.0L);
  std::vector<double> defect(static_cast<std::size_t>(n_chunks), 0.0);
  std::vector<double> drift(static_cast<std::size_t>(n_chunks), 0.0);

  detail::for_each_chunk(n, cfg.resolved_workers(), [&](std::int64_t lo, std::int64_t hi, std::int64_t c) {
    using T = TangentMember::Scalar;
    auto rhs = [&params](const T* y, T* dy) { detail::tangent_rhs(params, y, dy); };
    const T h = static_cast<T>(cfg.dt);
    double max_defect = 0.0, max_drift = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) {
      Vec4 dev;
      const Vec4 gamma0 = sampler.draw(cfg.seed, i, &dev);
      TangentMember m = TangentMember::start(params, gamma0);
      m.weight_vec = sampler.sigma_inv * dev;
      for (long r = 0; r < n_records; ++r) {
        if (r > 0) {
          for (int s = 0; s < cfg.output_stride; ++s) rk4_step<20>(m.y.data(), h, rhs);
          m.t += cfg.dt * cfg.output_stride;
        }
        const double w = detail::chi_weight(m);
        const std::size_t slot = static_cast<std::size_t>(c * n_records + r);
        sum_w[slot] += w;
        sum_w2[slot] += static_cast<long double>(w) * w;
        const double d = m.defect();
        max_defect = std::max(max_defect, std::isfinite(d) ? d : std::numeric_limits<double>::infinity());
        if (m.t > 0.0) max_drift = std::max(max_drift, m.energy_drift(params) / m.t);
      }
    }
    defect[static_cast<std::size_t>(c)] = max_defect;
    drift[static_cast<std::size_t>(c)] = max_drift;
  });

  ChiSeries out;
  for (long r = 0; r < n_records; ++r) {
    long double sw = 0.0L, sw2 = 0.0L;
    for (std::int64_t c = 0; c < n_chunks; ++c) {
      sw += sum_w[static_cast<std::size_t>(c * n_records + r)];
      sw2 += sum_w2[static_cast<std::size_t>(c * n_records + r)];
    }
    const double mean = static_cast<double>(sw / static_cast<long double>(n));
    const double var = std::max(0.0, static_cast<double>(sw2 / static_cast<long double>(n)) - mean * mean);
    const double chi = std::sqrt(mean);
    out.t.push_back(static_cast<double>(r) * cfg.output_stride * cfg.dt);
    out.chi.push_back(chi);
    out.std_error.push_back(chi > 0.0 ? std::sqrt(var / static_cast<double>(n)) / (2.0 * chi) : 0.0);
  }
  for (std::int64_t c = 0; c < n_chunks; ++c) {
    out.stats.max_defect = std::max(out.stats.max_defect, defect[static_cast<std::size_t>(c)]);
    out.stats.max_energy_drift_rate = std::max(out.stats.max_energy_drift_rate, drift[static_cast<std::size_t>(c)]);
  }
  if (!(out.stats.max_defect <= kDefectAbort))
    throw SimulationError("run_chi_ensemble: symplectic defect " + std::to_string(out.stats.max_defect) +
                          " exceeds 1e-5; reduce dt");
  return out;
}

// Per-coordinate means and variances over time for a density-law ensemble.
// Only the trajectories are propagated (no tangent matrices).
inline MomentSeries run_moment_ensemble(const ModelParams& params, const GaussianSpec& spec,
                                        const EnsembleRunConfig& cfg) {
  cfg.validate();
  const detail::Sampler sampler(spec, SampleLaw::kDensity);
  const long n_records = cfg.n_records();
  const std::int64_t n = cfg.n_samples;
  const std::int64_t n_chunks = (n + kReductionChunk - 1) / kReductionChunk;

  std::vector<long double> acc(static_cast<std::size_t>(n_chunks * n_records * 8), 0.0L);
  std::vector<double> drift(static_cast<std::size_t>(n_chunks), 0.0);

  detail::for_each_chunk(n, cfg.resolved_workers(), [&](std::int64_t lo, std::int64_t hi, std::int64_t c) {
    using T = TangentMember::Scalar;
    auto rhs = [&params](const T* y, T* dy) { flow_field_t(params, y, dy); };
    const T h = static_cast<T>(cfg.dt);
    double max_drift = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) {
      const Vec4 gamma0 = sampler.draw(cfg.seed, i);
      T y[4] = {static_cast<T>(gamma0[0]), static_cast<T>(gamma0[1]), static_cast<T>(gamma0[2]),
                static_cast<T>(gamma0[3])};
      const double e0 = energy(params, gamma0);
      for (long r = 0; r < n_records; ++r) {
        if (r > 0)
          for (int s = 0; s < cfg.output_stride; ++s) rk4_step<4>(y, h, rhs);
        long double* slot = acc.data() + static_cast<std::size_t>((c * n_records + r) * 8);
        for (int j = 0; j < 4; ++j) {
          slot[j] += y[j];
          slot[4 + j] += y[j] * y[j];
        }
        if (r > 0) {
          const double t = static_cast<double>(r) * cfg.output_stride * cfg.dt;
          const double e = static_cast<double>(energy_t(params, y));
          max_drift = std::max(max_drift, std::abs(e - e0) / std::max(std::abs(e0), 1e-300) / t);
        }
      }
    }
    drift[static_cast<std::size_t>(c)] = max_drift;
  });

  MomentSeries out;
  for (long r = 0; r < n_records; ++r) {
    long double sum[4] = {0, 0, 0, 0}, sum2[4] = {0, 0, 0, 0};
    for (std::int64_t c = 0; c < n_chunks; ++c) {
      const long double* slot = acc.data() + static_cast<std::size_t>((c * n_records + r) * 8);
      for (int j = 0; j < 4; ++j) {
        sum[j] += slot[j];
        sum2[j] += slot[4 + j];
      }
    }
    std::array<double, 4> mean{}, var{};
    for (int j = 0; j < 4; ++j) {
      const long double mu = sum[j] / static_cast<long double>(n);
      mean[static_cast<std::size_t>(j)] = static_cast<double>(mu);
      var[static_cast<std::size_t>(j)] = static_cast<double>(
          (sum2[j] - static_cast<long double>(n) * mu * mu) / static_cast<long double>(n - 1));
    }
    out.t.push_back(static_cast<double>(r) * cfg.output_stride * cfg.dt);
    out.mean.push_back(mean);
    out.variance.push_back(var);
  }
  for (std::int64_t c = 0; c < n_chunks; ++c)
    out.stats.max_energy_drift_rate = std::max(out.stats.max_energy_drift_rate, drift[static_cast<std::size_t>(c)]);
  return out;
}

}  // namespace qcc
