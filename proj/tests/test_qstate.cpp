#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "entbell/qstate.hpp"

using namespace entbell;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double inv_sqrt2 = std::numbers::sqrt2 / 2.0;

StateVector random_state(std::size_t n_qubits, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n_qubits; ++i) labels.push_back("q" + std::to_string(i));
  std::vector<cplx> amps(std::size_t{1} << n_qubits);
  for (auto& a : amps) a = cplx{gauss(rng), gauss(rng)};
  return from_amplitudes(std::move(labels), std::move(amps));
}

}  // namespace

TEST_CASE("make_ket produces the documented amplitudes") {
  const auto h = make_ket({"a"}, {'H'});
  CHECK_THAT(std::abs(h.amps[0] - 1.0), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(h.amps[1]), WithinAbs(0.0, 1e-15));

  const auto r = make_ket({"a"}, {'R'});
  CHECK_THAT(std::abs(r.amps[0] - inv_sqrt2), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(r.amps[1] - cplx{0.0, inv_sqrt2}), WithinAbs(0.0, 1e-15));

  const auto pm = make_ket({"a", "b"}, {'+', '-'});
  CHECK_THAT(std::abs(pm.amps[0] - 0.5), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(pm.amps[1] + 0.5), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(pm.amps[2] - 0.5), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(pm.amps[3] + 0.5), WithinAbs(0.0, 1e-15));
  CHECK(pm.norm_weight == 1.0);
}

TEST_CASE("make_ket rejects bad input") {
  CHECK_THROWS_AS(make_ket({"a"}, {'X'}), std::invalid_argument);
  CHECK_THROWS_AS(make_ket({"a", "a"}, {'H', 'H'}), std::invalid_argument);
  CHECK_THROWS_AS(make_ket({"a", "b"}, {'H'}), std::invalid_argument);
  CHECK_THROWS_AS(make_ket({"q0", "q1", "q2", "q3", "q4", "q5", "q6"},
                           {'H', 'H', 'H', 'H', 'H', 'H', 'H'}),
                  std::invalid_argument);
}

TEST_CASE("Bell states match their printed sign conventions") {
  const auto phi_m = bell_state(BellKind::phi_minus, "b1", "b2");
  CHECK_THAT(std::abs(phi_m.amps[0] - inv_sqrt2), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(phi_m.amps[3] + inv_sqrt2), WithinAbs(0.0, 1e-15));

  const auto psi_p = bell_state(BellKind::psi_plus, "b1", "b2");
  CHECK_THAT(std::abs(psi_p.amps[1] - inv_sqrt2), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(psi_p.amps[2] - inv_sqrt2), WithinAbs(0.0, 1e-15));

  CHECK_THROWS_AS(bell_state(BellKind::phi_plus, "a", "a"), std::invalid_argument);
}

TEST_CASE("the four Bell states are mutually orthonormal") {
  const std::array kinds{BellKind::phi_plus, BellKind::phi_minus, BellKind::psi_plus,
                         BellKind::psi_minus};
  for (std::size_t i = 0; i < kinds.size(); ++i)
    for (std::size_t j = 0; j < kinds.size(); ++j) {
      const cplx ov = inner(bell_state(kinds[i], "x", "y"), bell_state(kinds[j], "x", "y"));
      CHECK_THAT(std::abs(ov - (i == j ? 1.0 : 0.0)), WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("tensor concatenates registers") {
  const auto hv = tensor(make_ket({"a"}, {'H'}), make_ket({"b"}, {'V'}));
  CHECK(hv.labels == std::vector<std::string>{"a", "b"});
  CHECK_THAT(std::abs(hv.amps[1] - 1.0), WithinAbs(0.0, 1e-15));

  const auto source = tensor(bell_state(BellKind::phi_plus, "a1", "b1"),
                             bell_state(BellKind::phi_plus, "a2", "b2"));
  CHECK_THAT(norm2(source), WithinAbs(1.0, 1e-12));

  CHECK_THROWS_AS(tensor(make_ket({"a"}, {'H'}), make_ket({"a"}, {'V'})), std::invalid_argument);
}

TEST_CASE("tensor multiplies post-selection weights") {
  auto a = make_ket({"a"}, {'+'});
  auto [pa, p1] = project(a, outer_projector<2>({cplx{1, 0}, cplx{0, 0}}), "a");
  auto b = make_ket({"b"}, {'+'});
  auto [pb, p2] = project(b, outer_projector<2>({cplx{1, 0}, cplx{0, 0}}), "b");
  const auto both = tensor(pa, pb);
  CHECK_THAT(both.norm_weight, WithinAbs(p1 * p2, 1e-12));
}

TEST_CASE("apply_single acts on the selected tensor factor only") {
  SingleQubitOp z;  // half-wave plate at 0: diag(1, -1)
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  const auto v = make_ket({"a", "b"}, {'H', 'V'});
  const auto flipped = apply_single(z, "b", v);
  CHECK_THAT(std::abs(flipped.amps[1] + 1.0), WithinAbs(0.0, 1e-15));

  const auto same = apply_single(SingleQubitOp::identity(), "a", v);
  CHECK_THAT(fidelity(same, v), WithinAbs(1.0, 1e-12));

  CHECK_THROWS_AS(apply_single(z, "c", v), std::invalid_argument);
}

TEST_CASE("projection renormalizes and reports the probability") {
  const auto plus = make_ket({"a"}, {'+'});
  const SingleQubitOp ph = outer_projector<2>({cplx{1, 0}, cplx{0, 0}});
  auto [h_state, p] = project(plus, ph, "a");
  CHECK_THAT(p, WithinAbs(0.5, 1e-12));
  CHECK_THAT(fidelity(h_state, make_ket({"a"}, {'H'})), WithinAbs(1.0, 1e-12));
  CHECK_THAT(h_state.norm_weight, WithinAbs(0.5, 1e-12));

  TwoQubitOp phh;
  phh(0, 0) = 1.0;
  auto [hh_state, p2] = project(bell_state(BellKind::phi_minus, "x", "y"), phh, "x", "y");
  CHECK_THAT(p2, WithinAbs(0.5, 1e-12));
  CHECK_THAT(fidelity(hh_state, make_ket({"x", "y"}, {'H', 'H'})), WithinAbs(1.0, 1e-12));

  const SingleQubitOp pv = outer_projector<2>({cplx{0, 0}, cplx{1, 0}});
  auto [empty_state, p3] = project(make_ket({"a"}, {'H'}), pv, "a");
  CHECK(empty_state.empty);
  CHECK_THAT(p3, WithinAbs(0.0, 1e-12));

  SingleQubitOp not_projector = SingleQubitOp::identity();
  not_projector(0, 1) = 0.5;
  CHECK_THROWS_AS(project(plus, not_projector, "a"), std::invalid_argument);
}

TEST_CASE("inner product reorders matching mode sets") {
  const auto ab = make_ket({"a", "b"}, {'H', 'V'});
  const auto ba = make_ket({"b", "a"}, {'V', 'H'});
  CHECK_THAT(fidelity(ab, ba), WithinAbs(1.0, 1e-12));
  CHECK_THAT(fidelity(ab, ab), WithinAbs(1.0, 1e-12));
  CHECK_THAT(fidelity(bell_state(BellKind::phi_plus, "x", "y"),
                      bell_state(BellKind::phi_minus, "x", "y")),
             WithinAbs(0.0, 1e-12));
  CHECK_THROWS_AS(inner(ab, make_ket({"a", "c"}, {'H', 'V'})), std::invalid_argument);
}

TEST_CASE("projection keeps states normalized", "[property]") {
  std::mt19937_64 rng(321);
  for (int trial = 0; trial < 25; ++trial) {
    auto s = random_state(4, rng);
    const double angle = 0.13 * trial;
    const SingleQubitOp p =
        outer_projector<2>({cplx{std::cos(angle), 0.0}, cplx{std::sin(angle), 0.0}});
    auto [post, prob] = project(s, p, "q1");
    if (!post.empty) {
      CHECK_THAT(norm2(post), WithinAbs(1.0, 1e-12));
      CHECK(prob >= 0.0);
      CHECK(prob <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("basis-change matrices are unitary and conventional") {
  for (auto b : {Basis::hv, Basis::pm, Basis::rl}) CHECK(basis_change(b).is_unitary(1e-12));

  // φ− in the ± basis is (|+−> + |−+>)/√2
  const auto phi_m = bell_state(BellKind::phi_minus, "b1", "b2");
  auto in_pm = apply_single(basis_change(Basis::pm), "b1", phi_m);
  in_pm = apply_single(basis_change(Basis::pm), "b2", in_pm);
  CHECK_THAT(std::abs(in_pm.amps[0]), WithinAbs(0.0, 1e-12));
  CHECK_THAT(std::abs(in_pm.amps[1] - inv_sqrt2), WithinAbs(0.0, 1e-12));
  CHECK_THAT(std::abs(in_pm.amps[2] - inv_sqrt2), WithinAbs(0.0, 1e-12));
  CHECK_THAT(std::abs(in_pm.amps[3]), WithinAbs(0.0, 1e-12));
}

TEST_CASE("three-photon target equals the circular-basis GHZ form") {
  const auto target = superpose(
      inv_sqrt2, tensor(make_ket({"a"}, {'H'}), bell_state(BellKind::phi_minus, "b1", "b2")),
      -inv_sqrt2, tensor(make_ket({"a"}, {'V'}), bell_state(BellKind::psi_plus, "b1", "b2")));
  const auto ghz = superpose(inv_sqrt2, make_ket({"a", "b1", "b2"}, {'R', 'R', 'R'}),
                             inv_sqrt2, make_ket({"a", "b1", "b2"}, {'L', 'L', 'L'}));
  CHECK_THAT(fidelity(target, ghz), WithinAbs(1.0, 1e-12));
}
