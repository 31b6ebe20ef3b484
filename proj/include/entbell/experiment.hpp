#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "entbell/optics.hpp"
#include "entbell/qstate.hpp"

// The full measurement pipeline: two Bell pairs fused on a polarizing
// beamsplitter into a four-photon GHZ state, quarter-wave plates and a
// trigger projection reducing it to the three-photon target state, then
// Alice's polarizer measurement and Bob's entangled-state analyzer.
//
// Target state over modes (a, b1, b2):
//   (1/√2)(|H>_a |φ−>_{b1,b2} − |V>_a |ψ+>_{b1,b2})
// equivalently (1/√2)(|RRR> + |LLL>) in the circular basis.

namespace entbell {

struct MeasurementSetting {
  double theta1 = 0.0;  // Alice's polarizer orientation (radians, real space)
  double theta2 = 0.0;  // Bob's Bell-superposition mixing angle (HWP at theta2/2)
  int sign_a = +1;      // −1 means polarizer at theta1 + π/2
  int sign_b = +1;      // −1 means HWP at (theta2 + π/2)/2
};

struct PrepSettings {
  std::array<double, 4> qwp_angles{};  // physical angles on modes T, a, b1, b2
  double calibration_phase = 0.0;      // diag(1, e^{iφ}) on mode a after the trigger projection
  char trigger = 'H';                  // trigger-photon projection basis state
};

struct PreparedState {
  StateVector state;                    // over (a, b1, b2)
  double preparation_probability = 0;   // accumulated post-selection weight
  double calibration_phase = 0;
};

// Both analyzer output polarizers sit at +45°. With the half-wave plate
// convention of optics.hpp this pairing makes the post-selected circuit
// statistics reproduce the rank-1 analyzer projector exactly; it is fixed by
// the projector/circuit equivalence test, not assumed.
struct AnalyzerConvention {
  double polarizer1 = std::numbers::pi / 4;
  double polarizer2 = std::numbers::pi / 4;
};

/// Source state: |φ+>_{a1,b1} ⊗ |φ+>_{a2,b2}.
inline StateVector build_source() {
  return tensor(bell_state(BellKind::phi_plus, "a1", "b1"),
                bell_state(BellKind::phi_plus, "a2", "b2"));
}

/// PBS1 fusion stage: parity check on (a1, a2), relabeled to (T, a).
/// For the ideal source this yields the four-photon GHZ state with p = 1/2.
inline std::pair<StateVector, double> fuse_source(const StateVector& source) {
  return pbs_parity_check(source, PbsPorts{"a1", "a2", "T", "a"});
}

/// The three-photon target state over (a, b1, b2).
inline StateVector target_state() {
  constexpr double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
  const StateVector h_branch = tensor(make_ket({"a"}, {'H'}), bell_state(BellKind::phi_minus, "b1", "b2"));
  const StateVector v_branch = tensor(make_ket({"a"}, {'V'}), bell_state(BellKind::psi_plus, "b1", "b2"));
  return superpose(inv_sqrt2, h_branch, -inv_sqrt2, v_branch);
}

/// (1/√2)(|RRR> + |LLL>) over (a, b1, b2).
inline StateVector ghz_circular() {
  constexpr double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
  return superpose(inv_sqrt2, make_ket({"a", "b1", "b2"}, {'R', 'R', 'R'}),
                   inv_sqrt2, make_ket({"a", "b1", "b2"}, {'L', 'L', 'L'}));
}

namespace detail {
inline PreparedState prepare_from_fused(const StateVector& fused, double fuse_probability,
                                        const PrepSettings& settings) {
  if (fused.empty) throw std::runtime_error("parity check rejected the entire source state");
  static const std::array<std::string, 4> modes{"T", "a", "b1", "b2"};
  StateVector s = fused;
  for (std::size_t i = 0; i < modes.size(); ++i)
    s = apply_single(qwp(settings.qwp_angles[i]), modes[i], s);
  const double trigger_angle = (settings.trigger == 'H') ? 0.0 : std::numbers::pi / 2;
  auto [projected, p_trigger] = project(s, polarizer_projector(trigger_angle), "T");
  if (projected.empty) throw std::runtime_error("trigger projection annihilated the state");
  StateVector reduced = drop_mode(projected, "T", settings.trigger == 'H' ? 0 : 1);
  reduced = apply_single(phase_gate(settings.calibration_phase), "a", reduced);
  reduced = reorder(reduced, {"a", "b1", "b2"});
  return PreparedState{std::move(reduced), fuse_probability * p_trigger, settings.calibration_phase};
}
}  // namespace detail

/// Run the full preparation pipeline: source → PBS1 → QWPs → trigger
/// projection onto |H>_T → calibration phase. The returned probability is the
/// cumulative post-selection weight (1/4 for the calibrated configuration).
inline PreparedState prepare_state(const PrepSettings& settings) {
  if (settings.trigger != 'H' && settings.trigger != 'V')
    throw std::invalid_argument("trigger projection must be 'H' or 'V'");
  auto [fused, p_fuse] = fuse_source(build_source());
  return detail::prepare_from_fused(fused, p_fuse, settings);
}

/// Grid-search the QWP angles (multiples of π/4 in [0,π)) and the calibration
/// phase (multiples of π/2) for the first configuration reproducing the
/// target state with fidelity ≥ 1−1e-9. Search order is lexicographic in
/// (qwp_T, qwp_a, qwp_b1, qwp_b2, phase), so the result is deterministic.
inline PrepSettings calibrate_preparation(const StateVector& fused, double fuse_probability,
                                          char trigger = 'H') {
  const StateVector target = target_state();
  constexpr double pi = std::numbers::pi;
  const std::array<double, 4> angle_grid{0.0, pi / 4, pi / 2, 3 * pi / 4};
  const std::array<double, 4> phase_grid{0.0, pi / 2, pi, 3 * pi / 2};
  for (double qt : angle_grid)
    for (double qa : angle_grid)
      for (double qb1 : angle_grid)
        for (double qb2 : angle_grid)
          for (double phase : phase_grid) {
            PrepSettings candidate{{qt, qa, qb1, qb2}, phase, trigger};
            PreparedState prep;
            try {
              prep = detail::prepare_from_fused(fused, fuse_probability, candidate);
            } catch (const std::runtime_error&) {
              continue;  // configuration annihilates the state
            }
            if (fidelity(prep.state, target) >= 1.0 - kPipelineTol) return candidate;
          }
  throw std::runtime_error("calibration failed: no wave-plate configuration reaches the target state");
}

inline PrepSettings calibrate_preparation(char trigger = 'H') {
  auto [fused, p_fuse] = fuse_source(build_source());
  return calibrate_preparation(fused, p_fuse, trigger);
}

/// The calibrated configuration (discovered by calibrate_preparation and
/// frozen here and in config/default.json).
inline PrepSettings default_prep_settings() {
  constexpr double q = std::numbers::pi / 4;
  return PrepSettings{{q, q, q, q}, 0.0, 'H'};
}

inline SingleQubitOp alice_projector(double theta1, int sign) {
  return polarizer_projector(sign >= 0 ? theta1 : theta1 + std::numbers::pi / 2);
}

/// Analyzed Bell superposition over (b1, b2):
///   +1: cosθ2 |φ−> + sinθ2 |ψ+>      −1: −sinθ2 |φ−> + cosθ2 |ψ+>
inline std::array<cplx, 4> bob_state(double theta2, int sign) {
  constexpr double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
  const double c = (sign >= 0 ? std::cos(theta2) : -std::sin(theta2));
  const double s = (sign >= 0 ? std::sin(theta2) : std::cos(theta2));
  // c·(|HH>−|VV>)/√2 + s·(|HV>+|VH>)/√2
  return {cplx{c * inv_sqrt2, 0.0}, cplx{s * inv_sqrt2, 0.0},
          cplx{s * inv_sqrt2, 0.0}, cplx{-c * inv_sqrt2, 0.0}};
}

inline TwoQubitOp bob_projector(double theta2, int sign) {
  return outer_projector<4>(bob_state(theta2, sign));
}

/// p = <Ψ| A ⊗ B |Ψ> for the chosen sign projectors. The four (±,±)
/// probabilities at fixed (θ1, θ2) sum to 1 for the target state.
inline double outcome_probability(const PreparedState& prepared, const MeasurementSetting& setting) {
  auto [after_alice, p_a] = project(prepared.state, alice_projector(setting.theta1, setting.sign_a), "a");
  if (after_alice.empty) return 0.0;
  auto [after_bob, p_b] = project(after_alice, bob_projector(setting.theta2, setting.sign_b), "b1", "b2");
  (void)after_bob;
  return p_a * p_b;
}

/// Circuit-level realization of Bob's analyzer: HWP on b2 at θ2/2 (sign +1)
/// or (θ2+π/2)/2 (sign −1), parity check (b1,b2)→(c1,c2), then one polarizer
/// per output port. Returns the raw post-selected four-fold probability
/// (together with Alice's projection); the physical analyzer accepts exactly
/// one polarizer pattern, so raw probabilities are half the projector values
/// and must be renormalized over accepted coincidences.
inline double circuit_outcome_probability(const PreparedState& prepared, const MeasurementSetting& setting,
                                          const AnalyzerConvention& analyzer = {}) {
  auto [after_alice, p_a] = project(prepared.state, alice_projector(setting.theta1, setting.sign_a), "a");
  if (after_alice.empty) return 0.0;
  const double hwp_angle =
      (setting.sign_b >= 0 ? setting.theta2 : setting.theta2 + std::numbers::pi / 2) / 2.0;
  StateVector s = apply_single(hwp(hwp_angle), "b2", after_alice);
  auto [post_pbs, p_parity] = pbs_parity_check(s, PbsPorts{"b1", "b2", "c1", "c2"});
  if (post_pbs.empty) return 0.0;
  auto [after_p1, p1] = project(post_pbs, polarizer_projector(analyzer.polarizer1), "c1");
  if (after_p1.empty) return 0.0;
  auto [after_p2, p2] = project(after_p1, polarizer_projector(analyzer.polarizer2), "c2");
  (void)after_p2;
  return p_a * p_parity * p1 * p2;
}

/// The four circuit probabilities at (θ1, θ2), renormalized over accepted
/// four-fold coincidences. Outcome order: ++, +−, −+, −−.
inline std::array<double, 4> circuit_outcome_probabilities(const PreparedState& prepared, double theta1,
                                                           double theta2,
                                                           const AnalyzerConvention& analyzer = {}) {
  std::array<double, 4> raw{};
  std::size_t k = 0;
  for (int sa : {+1, -1})
    for (int sb : {+1, -1})
      raw[k++] = circuit_outcome_probability(prepared, {theta1, theta2, sa, sb}, analyzer);
  const double total = raw[0] + raw[1] + raw[2] + raw[3];
  if (total < kEmptyTol) throw std::runtime_error("analyzer circuit accepted no coincidences");
  for (auto& p : raw) p /= total;
  return raw;
}

/// Ideal outcome probabilities in order ++, +−, −+, −−.
inline std::array<double, 4> ideal_outcome_probabilities(const PreparedState& prepared, double theta1,
                                                         double theta2) {
  return {outcome_probability(prepared, {theta1, theta2, +1, +1}),
          outcome_probability(prepared, {theta1, theta2, +1, -1}),
          outcome_probability(prepared, {theta1, theta2, -1, +1}),
          outcome_probability(prepared, {theta1, theta2, -1, -1})};
}

/// E = p(++) + p(−−) − p(+−) − p(−+); equals cos[2(θ1+θ2)] for the target.
inline double correlation_exact(const PreparedState& prepared, double theta1, double theta2) {
  const auto p = ideal_outcome_probabilities(prepared, theta1, theta2);
  return p[0] + p[3] - p[1] - p[2];
}

inline PreparedState ideal_prepared_state() {
  return PreparedState{target_state(), 1.0, 0.0};
}

/// Rebuild the target state from its expansion in the rotated bases
///   {cosθ1|H>+sinθ1|V>, sinθ1|H>−cosθ1|V>} for Alice and
///   {cosθ2|φ−>+sinθ2|ψ+>, sinθ2|φ−>−cosθ2|ψ+>} for Bob:
///   cos(θ1+θ2)·(1/√2)(|H̃>|B̃+> − |Ṽ>|B̃⊥>) + sin(θ1+θ2)·(1/√2)(|Ṽ>|B̃+> + |H̃>|B̃⊥>)
/// and return its fidelity with the target (1 for all angles).
inline double verify_rotated_expansion(double theta1, double theta2) {
  const double c1 = std::cos(theta1), s1 = std::sin(theta1);
  const double c2 = std::cos(theta2), s2 = std::sin(theta2);
  const std::array<cplx, 2> a_par{cplx{c1, 0}, cplx{s1, 0}};
  const std::array<cplx, 2> a_perp{cplx{s1, 0}, cplx{-c1, 0}};
  const auto b_par = bob_state(theta2, +1);
  // sinθ2|φ−> − cosθ2|ψ+>
  constexpr double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
  const std::array<cplx, 4> b_perp{cplx{s2 * inv_sqrt2, 0}, cplx{-c2 * inv_sqrt2, 0},
                                   cplx{-c2 * inv_sqrt2, 0}, cplx{-s2 * inv_sqrt2, 0}};
  const double cs = std::cos(theta1 + theta2), sn = std::sin(theta1 + theta2);
  std::vector<cplx> amps(8);
  for (std::size_t ia = 0; ia < 2; ++ia)
    for (std::size_t ib = 0; ib < 4; ++ib) {
      const cplx corr = a_par[ia] * b_par[ib] - a_perp[ia] * b_perp[ib];
      const cplx anti = a_perp[ia] * b_par[ib] + a_par[ia] * b_perp[ib];
      amps[ia * 4 + ib] = (cs * corr + sn * anti) * inv_sqrt2;
    }
  const StateVector rebuilt = from_amplitudes({"a", "b1", "b2"}, std::move(amps));
  return fidelity(rebuilt, target_state());
}

}  // namespace entbell
