#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "entbell/experiment.hpp"
#include "entbell/rng.hpp"

// Noise modeling, Monte Carlo coincidence counting, correlation and CHSH
// estimation with Poisson error propagation, and the classical bounds
// (local-hidden-variable maximum, critical visibility).

namespace entbell {

enum class BasisFamily { hv, pm };

/// Measurement family of an analyzer setting: hv when θ2 is a multiple of
/// π/2 (the |φ−>-like analyzed states, correlated with Alice in H/V), pm
/// otherwise.
inline BasisFamily basis_family_for(double theta2) {
  return std::abs(std::sin(2.0 * theta2)) < 1e-9 ? BasisFamily::hv : BasisFamily::pm;
}

enum class NoiseMode { uniform_white_noise, per_basis };

struct NoiseModel {
  NoiseMode mode = NoiseMode::uniform_white_noise;
  double visibility = 1.0;      // uniform_white_noise
  double visibility_hv = 1.0;   // per_basis
  double visibility_pm = 1.0;

  static NoiseModel uniform_white(double v) {
    check_visibility(v);
    NoiseModel m;
    m.mode = NoiseMode::uniform_white_noise;
    m.visibility = v;
    return m;
  }

  static NoiseModel per_basis(double v_hv, double v_pm) {
    check_visibility(v_hv);
    check_visibility(v_pm);
    NoiseModel m;
    m.mode = NoiseMode::per_basis;
    m.visibility_hv = v_hv;
    m.visibility_pm = v_pm;
    return m;
  }

  double visibility_for(BasisFamily family) const {
    if (mode == NoiseMode::uniform_white_noise) return visibility;
    return family == BasisFamily::hv ? visibility_hv : visibility_pm;
  }

 private:
  static void check_visibility(double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("visibility must lie in [0,1]");
  }
};

/// White-noise mixing: p → v·p + (1−v)/4 per outcome, with v chosen by the
/// basis family of the setting.
inline std::array<double, 4> apply_noise(const std::array<double, 4>& ideal_probs,
                                         const NoiseModel& model, BasisFamily family) {
  double total = 0.0;
  for (double p : ideal_probs) {
    if (p < -1e-9) throw std::invalid_argument("outcome probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("outcome probabilities must sum to 1");
  const double v = model.visibility_for(family);
  std::array<double, 4> noisy{};
  for (std::size_t i = 0; i < 4; ++i) noisy[i] = v * ideal_probs[i] + (1.0 - v) * 0.25;
  return noisy;
}

struct SettingCounts {
  std::uint64_t n_pp = 0, n_pm = 0, n_mp = 0, n_mm = 0;
  double duration_s = 1800.0;

  std::uint64_t total() const { return n_pp + n_pm + n_mp + n_mm; }
};

struct CorrelationEstimate {
  double e_value = 0.0;
  double sigma = 0.0;
};

/// E = (N++ + N−− − N+− − N−+) / total, with the uncertainty from
/// independent Poisson errors on the four counts:
/// σ_E = 2·sqrt((N++ + N−−)·(N+− + N−+) / total³).
inline CorrelationEstimate correlation_from_counts(const SettingCounts& c) {
  const double total = static_cast<double>(c.total());
  if (c.total() == 0) throw std::invalid_argument("correlation undefined for zero total counts");
  const double corr = static_cast<double>(c.n_pp + c.n_mm);
  const double anti = static_cast<double>(c.n_pm + c.n_mp);
  CorrelationEstimate est;
  est.e_value = (corr - anti) / total;
  est.sigma = 2.0 * std::sqrt(corr * anti / (total * total * total));
  return est;
}

struct ChshResult {
  std::array<CorrelationEstimate, 4> correlations{};
  double s_value = 0.0;
  double s_sigma = 0.0;
  double sigmas_of_violation = 0.0;  // (S − 2)/σ_S

  bool violates_lhv_bound() const { return s_value > 2.0; }
};

/// S = |−E1 + E2 + E3 + E4| with σ_S = sqrt(Σ σ_i²).
inline ChshResult chsh(const CorrelationEstimate& e1, const CorrelationEstimate& e2,
                       const CorrelationEstimate& e3, const CorrelationEstimate& e4) {
  ChshResult r;
  r.correlations = {e1, e2, e3, e4};
  r.s_value = std::abs(-e1.e_value + e2.e_value + e3.e_value + e4.e_value);
  r.s_sigma = std::sqrt(e1.sigma * e1.sigma + e2.sigma * e2.sigma + e3.sigma * e3.sigma +
                        e4.sigma * e4.sigma);
  r.sigmas_of_violation = (r.s_sigma > 0.0)
                              ? (r.s_value - 2.0) / r.s_sigma
                              : std::numeric_limits<double>::infinity() * (r.s_value >= 2.0 ? 1.0 : -1.0);
  return r;
}

inline std::array<double, 4> noisy_outcome_probabilities(const PreparedState& prepared, double theta1,
                                                         double theta2, const NoiseModel& noise) {
  return apply_noise(ideal_outcome_probabilities(prepared, theta1, theta2), noise,
                     basis_family_for(theta2));
}

/// Draw the four coincidence counts for one (θ1, θ2) pair, each independently
/// Poisson with mean mean_total·p_outcome. Identical seed ⇒ identical counts.
inline SettingCounts simulate_counts(const PreparedState& prepared, double theta1, double theta2,
                                     const NoiseModel& noise, double mean_total, std::uint64_t seed,
                                     double duration_s = 1800.0) {
  if (mean_total < 0.0) throw std::invalid_argument("mean_total must be nonnegative");
  const auto probs = noisy_outcome_probabilities(prepared, theta1, theta2, noise);
  std::mt19937_64 rng(seed);
  SettingCounts c;
  c.duration_s = duration_s;
  c.n_pp = sample_poisson(mean_total * probs[0], rng);
  c.n_pm = sample_poisson(mean_total * probs[1], rng);
  c.n_mp = sample_poisson(mean_total * probs[2], rng);
  c.n_mm = sample_poisson(mean_total * probs[3], rng);
  return c;
}

struct FringePoint {
  double theta1 = 0.0;       // radians
  double counts = 0.0;       // sampled (integral) or expected (exact mode)
};

/// Coincidence counts versus Alice's angle for Bob's fixed +1 outcome; the
/// envelope follows cos²(θ1+θ2). One independent stream per angle point.
inline std::vector<FringePoint> fringe_scan(const PreparedState& prepared, double theta2,
                                            std::span<const double> theta1_list,
                                            const NoiseModel& noise, double mean_total,
                                            std::uint64_t seed) {
  if (theta1_list.empty()) throw std::invalid_argument("fringe scan needs at least one angle");
  std::vector<FringePoint> out;
  out.reserve(theta1_list.size());
  for (std::size_t i = 0; i < theta1_list.size(); ++i) {
    const double t1 = theta1_list[i];
    const auto probs = noisy_outcome_probabilities(prepared, t1, theta2, noise);
    std::mt19937_64 rng(derive_stream_seed(seed, i));
    out.push_back({t1, static_cast<double>(sample_poisson(mean_total * probs[0], rng))});
  }
  return out;
}

/// Expected (sampling-free) fringe curve for exact mode.
inline std::vector<FringePoint> fringe_expected(const PreparedState& prepared, double theta2,
                                                std::span<const double> theta1_list,
                                                const NoiseModel& noise, double mean_total) {
  if (theta1_list.empty()) throw std::invalid_argument("fringe scan needs at least one angle");
  std::vector<FringePoint> out;
  out.reserve(theta1_list.size());
  for (double t1 : theta1_list) {
    const auto probs = noisy_outcome_probabilities(prepared, t1, theta2, noise);
    out.push_back({t1, mean_total * probs[0]});
  }
  return out;
}

struct SinusoidFit {
  double mean = 0.0;     // a0 in count(θ) = a0 + a1·cos2θ + b1·sin2θ
  double amp_cos = 0.0;  // a1
  double amp_sin = 0.0;  // b1

  double visibility() const { return std::hypot(amp_cos, amp_sin) / mean; }
  double eval(double theta) const {
    return mean + amp_cos * std::cos(2.0 * theta) + amp_sin * std::sin(2.0 * theta);
  }
};

/// Least-squares fit of count(θ) = A(1 + V·cos(2θ + φ0)); V is the fitted
/// fringe visibility (max−min)/(max+min).
inline SinusoidFit fit_fringe(std::span<const FringePoint> scan) {
  std::vector<double> distinct;
  for (const auto& p : scan) {
    bool seen = false;
    for (double d : distinct)
      if (std::abs(d - p.theta1) < 1e-12) { seen = true; break; }
    if (!seen) distinct.push_back(p.theta1);
  }
  if (distinct.size() < 4) throw std::invalid_argument("fringe fit needs at least 4 distinct angles");
  bool constant = true;
  for (const auto& p : scan)
    if (std::abs(p.counts - scan.front().counts) > 1e-12) { constant = false; break; }
  if (constant) throw std::invalid_argument("fringe fit is degenerate: all counts equal");

  // normal equations for the basis {1, cos2θ, sin2θ}
  double g[3][3] = {};
  double rhs[3] = {};
  for (const auto& p : scan) {
    const double x[3] = {1.0, std::cos(2.0 * p.theta1), std::sin(2.0 * p.theta1)};
    for (int r = 0; r < 3; ++r) {
      rhs[r] += x[r] * p.counts;
      for (int c = 0; c < 3; ++c) g[r][c] += x[r] * x[c];
    }
  }
  // Gaussian elimination with partial pivoting
  int perm[3] = {0, 1, 2};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(g[perm[r]][col]) > std::abs(g[perm[piv]][col])) piv = r;
    std::swap(perm[col], perm[piv]);
    const double d = g[perm[col]][col];
    if (std::abs(d) < 1e-12) throw std::invalid_argument("fringe fit is degenerate");
    for (int r = col + 1; r < 3; ++r) {
      const double f = g[perm[r]][col] / d;
      for (int c = col; c < 3; ++c) g[perm[r]][c] -= f * g[perm[col]][c];
      rhs[perm[r]] -= f * rhs[perm[col]];
    }
  }
  double sol[3];
  for (int r = 2; r >= 0; --r) {
    double acc = rhs[perm[r]];
    for (int c = r + 1; c < 3; ++c) acc -= g[perm[r]][c] * sol[c];
    sol[r] = acc / g[perm[r]][r];
  }
  if (std::abs(sol[0]) < 1e-12) throw std::invalid_argument("fringe fit is degenerate: zero mean");
  return SinusoidFit{sol[0], sol[1], sol[2]};
}

inline double fit_visibility(std::span<const FringePoint> scan) {
  return fit_fringe(scan).visibility();
}

/// CHSH value of one deterministic local strategy (outcomes ±1 per setting).
inline double lhv_strategy_value(int a1, int a2, int b1, int b2) {
  return std::abs(static_cast<double>(-a1 * b1 + a2 * b1 + a1 * b2 + a2 * b2));
}

/// Brute-force maximum of |S| over all 16 deterministic local strategies.
inline double lhv_max_chsh() {
  double best = 0.0;
  for (int a1 : {-1, +1})
    for (int a2 : {-1, +1})
      for (int b1 : {-1, +1})
        for (int b2 : {-1, +1}) best = std::max(best, lhv_strategy_value(a1, a2, b1, b2));
  return best;
}

/// The canonical maximizing settings {θ1, θ̃1, θ2, θ̃2} = {0°, 45°, 22.5°, 67.5°}.
inline std::array<double, 4> optimal_chsh_settings() {
  constexpr double pi = std::numbers::pi;
  return {0.0, pi / 4, pi / 8, 3 * pi / 8};
}

/// Exact (sampling-free) CHSH result from outcome probabilities under noise.
inline ChshResult chsh_exact(const PreparedState& prepared, const std::array<double, 4>& settings,
                             const NoiseModel& noise) {
  const auto [t1, t1b, t2, t2b] = settings;
  auto corr = [&](double a, double b) {
    const auto p = noisy_outcome_probabilities(prepared, a, b, noise);
    return CorrelationEstimate{p[0] + p[3] - p[1] - p[2], 0.0};
  };
  return chsh(corr(t1, t2), corr(t1b, t2), corr(t1, t2b), corr(t1b, t2b));
}

/// Binary-search the uniform white-noise visibility at which the
/// max-settings S equals 2; analytically 1/√2 since S(v) = 2√2·v.
inline double critical_visibility() {
  const PreparedState ideal = ideal_prepared_state();
  const auto settings = optimal_chsh_settings();
  auto s_of = [&](double v) {
    return chsh_exact(ideal, settings, NoiseModel::uniform_white(v)).s_value;
  };
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 60 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (s_of(mid) < 2.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace entbell
