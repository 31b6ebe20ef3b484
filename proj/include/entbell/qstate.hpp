#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Complex state-vector algebra for small registers of polarization qubits.
//
// Amplitude indexing convention: the first mode label is the most significant
// bit, with H=0 and V=1. State comparisons go through fidelity(), never
// amplitude-wise equality, since optical elements introduce irrelevant global
// phases. All values are immutable after construction; operations are pure.

namespace entbell {

using cplx = std::complex<double>;

inline constexpr double kAlgebraTol = 1e-12;  // single algebraic identities
inline constexpr double kPipelineTol = 1e-9;  // chained-pipeline fidelities
inline constexpr double kEmptyTol = 1e-14;    // post-selection cutoff
inline constexpr std::size_t kMaxQubits = 6;

template <std::size_t Dim>
struct Matrix {
  std::array<cplx, Dim * Dim> m{};

  cplx& operator()(std::size_t r, std::size_t c) { return m[r * Dim + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return m[r * Dim + c]; }

  static Matrix identity() {
    Matrix out;
    for (std::size_t i = 0; i < Dim; ++i) out(i, i) = 1.0;
    return out;
  }

  Matrix adjoint() const {
    Matrix out;
    for (std::size_t r = 0; r < Dim; ++r)
      for (std::size_t c = 0; c < Dim; ++c) out(r, c) = std::conj((*this)(c, r));
    return out;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix out;
    for (std::size_t r = 0; r < Dim; ++r)
      for (std::size_t k = 0; k < Dim; ++k) {
        const cplx ark = a(r, k);
        if (ark == cplx{}) continue;
        for (std::size_t c = 0; c < Dim; ++c) out(r, c) += ark * b(k, c);
      }
    return out;
  }

  friend Matrix operator*(cplx z, const Matrix& a) {
    Matrix out = a;
    for (auto& e : out.m) e *= z;
    return out;
  }

  // max |entry| difference
  double distance_to(const Matrix& o) const {
    double d = 0.0;
    for (std::size_t i = 0; i < Dim * Dim; ++i) d = std::max(d, std::abs(m[i] - o.m[i]));
    return d;
  }

  bool is_unitary(double tol = kAlgebraTol) const {
    return (adjoint() * *this).distance_to(identity()) < tol;
  }

  bool is_projector(double tol = kAlgebraTol) const {
    if (adjoint().distance_to(*this) >= tol) return false;
    return (*this * *this).distance_to(*this) < tol;
  }
};

using SingleQubitOp = Matrix<2>;
using TwoQubitOp = Matrix<4>;

template <std::size_t Dim>
inline Matrix<Dim> outer_projector(const std::array<cplx, Dim>& ket) {
  Matrix<Dim> out;
  for (std::size_t r = 0; r < Dim; ++r)
    for (std::size_t c = 0; c < Dim; ++c) out(r, c) = ket[r] * std::conj(ket[c]);
  return out;
}

// diag(1, e^{i phi}) on one mode
inline SingleQubitOp phase_gate(double phi) {
  SingleQubitOp g;
  g(0, 0) = 1.0;
  g(1, 1) = std::polar(1.0, phi);
  return g;
}

struct StateVector {
  std::vector<std::string> labels;  // mode names; labels[0] = most significant bit
  std::vector<cplx> amps;           // length 2^labels.size()
  double norm_weight = 1.0;         // post-selection success probability accumulated so far
  bool empty = false;               // a projection annihilated the state

  std::size_t num_qubits() const { return labels.size(); }

  std::size_t mode_index(std::string_view mode) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == mode) return i;
    throw std::invalid_argument("unknown mode '" + std::string(mode) + "'");
  }

  std::size_t bit_shift(std::size_t mode_idx) const { return labels.size() - 1 - mode_idx; }
};

inline double norm2(const StateVector& s) {
  double n = 0.0;
  for (const auto& a : s.amps) n += std::norm(a);
  return n;
}

inline void validate_labels(const std::vector<std::string>& labels) {
  if (labels.empty()) throw std::invalid_argument("state needs at least one mode");
  if (labels.size() > kMaxQubits) throw std::invalid_argument("registers beyond 6 qubits are unsupported");
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      if (labels[i] == labels[j])
        throw std::invalid_argument("duplicate mode name '" + labels[i] + "'");
}

inline StateVector& normalize(StateVector& s) {
  const double n = std::sqrt(norm2(s));
  if (n < kEmptyTol) throw std::runtime_error("cannot normalize a null state");
  for (auto& a : s.amps) a /= n;
  return s;
}

/// Build a state from explicit amplitudes (normalized on entry or here).
inline StateVector from_amplitudes(std::vector<std::string> labels, std::vector<cplx> amps) {
  validate_labels(labels);
  if (amps.size() != (std::size_t{1} << labels.size()))
    throw std::invalid_argument("amplitude length must be 2^(number of modes)");
  StateVector s{std::move(labels), std::move(amps)};
  normalize(s);
  return s;
}

// |H>, |V>, |±> = (|H>±|V>)/√2, |R/L> = (|H>±i|V>)/√2
inline std::array<cplx, 2> basis_ket(char letter) {
  constexpr double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
  switch (letter) {
    case 'H': return {cplx{1.0, 0.0}, cplx{0.0, 0.0}};
    case 'V': return {cplx{0.0, 0.0}, cplx{1.0, 0.0}};
    case '+': return {cplx{inv_sqrt2, 0.0}, cplx{inv_sqrt2, 0.0}};
    case '-': return {cplx{inv_sqrt2, 0.0}, cplx{-inv_sqrt2, 0.0}};
    case 'R': return {cplx{inv_sqrt2, 0.0}, cplx{0.0, inv_sqrt2}};
    case 'L': return {cplx{inv_sqrt2, 0.0}, cplx{0.0, -inv_sqrt2}};
    default:
      throw std::invalid_argument(std::string("unknown basis letter '") + letter + "'");
  }
}

inline StateVector make_ket(const std::vector<std::string>& labels, const std::vector<char>& letters) {
  validate_labels(labels);
  if (letters.size() != labels.size())
    throw std::invalid_argument("need one basis letter per mode");
  std::vector<cplx> amps{cplx{1.0, 0.0}};
  for (char c : letters) {
    const auto k = basis_ket(c);
    std::vector<cplx> next(amps.size() * 2);
    for (std::size_t i = 0; i < amps.size(); ++i) {
      next[2 * i] = amps[i] * k[0];
      next[2 * i + 1] = amps[i] * k[1];
    }
    amps = std::move(next);
  }
  return StateVector{labels, std::move(amps)};
}

enum class BellKind { phi_plus, phi_minus, psi_plus, psi_minus };

inline StateVector bell_state(BellKind kind, const std::string& l1, const std::string& l2) {
  validate_labels({l1, l2});
  constexpr double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
  std::vector<cplx> amps(4);
  switch (kind) {
    case BellKind::phi_plus:  amps = {inv_sqrt2, 0, 0, inv_sqrt2}; break;
    case BellKind::phi_minus: amps = {inv_sqrt2, 0, 0, -inv_sqrt2}; break;
    case BellKind::psi_plus:  amps = {0, inv_sqrt2, inv_sqrt2, 0}; break;
    case BellKind::psi_minus: amps = {0, inv_sqrt2, -inv_sqrt2, 0}; break;
  }
  return StateVector{{l1, l2}, std::move(amps)};
}

inline StateVector tensor(const StateVector& s1, const StateVector& s2) {
  for (const auto& l : s2.labels)
    for (const auto& k : s1.labels)
      if (l == k) throw std::invalid_argument("tensor factors share mode '" + l + "'");
  std::vector<std::string> labels = s1.labels;
  labels.insert(labels.end(), s2.labels.begin(), s2.labels.end());
  validate_labels(labels);
  std::vector<cplx> amps(s1.amps.size() * s2.amps.size());
  for (std::size_t i = 0; i < s1.amps.size(); ++i)
    for (std::size_t j = 0; j < s2.amps.size(); ++j)
      amps[i * s2.amps.size() + j] = s1.amps[i] * s2.amps[j];
  StateVector out{std::move(labels), std::move(amps)};
  out.norm_weight = s1.norm_weight * s2.norm_weight;
  out.empty = s1.empty || s2.empty;
  return out;
}

/// Permute the register to a new label order (same label set).
inline StateVector reorder(const StateVector& s, const std::vector<std::string>& new_order) {
  if (new_order.size() != s.labels.size())
    throw std::invalid_argument("reorder requires the same mode set");
  std::vector<std::size_t> src_pos(new_order.size());
  for (std::size_t i = 0; i < new_order.size(); ++i) src_pos[i] = s.mode_index(new_order[i]);
  const std::size_t n = s.labels.size();
  std::vector<cplx> amps(s.amps.size());
  for (std::size_t i = 0; i < s.amps.size(); ++i) {
    std::size_t j = 0;
    for (std::size_t q = 0; q < n; ++q) {
      const std::size_t bit = (i >> s.bit_shift(src_pos[q])) & 1u;
      j |= bit << (n - 1 - q);
    }
    amps[j] = s.amps[i];
  }
  StateVector out{new_order, std::move(amps)};
  out.norm_weight = s.norm_weight;
  out.empty = s.empty;
  return out;
}

inline cplx inner(const StateVector& s1, const StateVector& s2) {
  if (s1.labels.size() != s2.labels.size())
    throw std::invalid_argument("inner product requires matching mode sets");
  const StateVector* rhs = &s2;
  StateVector tmp;
  if (s1.labels != s2.labels) {
    // same set, different order: reorder; otherwise it throws below
    for (const auto& l : s1.labels) {
      if (std::find(s2.labels.begin(), s2.labels.end(), l) == s2.labels.end())
        throw std::invalid_argument("inner product requires matching mode sets");
    }
    tmp = reorder(s2, s1.labels);
    rhs = &tmp;
  }
  cplx acc{};
  for (std::size_t i = 0; i < s1.amps.size(); ++i) acc += std::conj(s1.amps[i]) * rhs->amps[i];
  return acc;
}

inline double fidelity(const StateVector& s1, const StateVector& s2) {
  return std::norm(inner(s1, s2));
}

/// Normalized superposition proportional to c1|s1> + c2|s2> (same mode set).
inline StateVector superpose(cplx c1, const StateVector& s1, cplx c2, const StateVector& s2) {
  const StateVector rhs = (s1.labels == s2.labels) ? s2 : reorder(s2, s1.labels);
  StateVector out{s1.labels, std::vector<cplx>(s1.amps.size())};
  for (std::size_t i = 0; i < s1.amps.size(); ++i)
    out.amps[i] = c1 * s1.amps[i] + c2 * rhs.amps[i];
  normalize(out);
  return out;
}

inline StateVector apply_single(const SingleQubitOp& op, std::string_view mode, const StateVector& s) {
  const std::size_t shift = s.bit_shift(s.mode_index(mode));
  StateVector out = s;
  for (std::size_t i = 0; i < s.amps.size(); ++i) {
    if ((i >> shift) & 1u) continue;  // handle each (0,1) pair once
    const std::size_t j = i | (std::size_t{1} << shift);
    const cplx a0 = s.amps[i], a1 = s.amps[j];
    out.amps[i] = op(0, 0) * a0 + op(0, 1) * a1;
    out.amps[j] = op(1, 0) * a0 + op(1, 1) * a1;
  }
  return out;
}

/// Two-qubit operator; mode_hi indexes the more significant bit of the 4x4 op.
inline StateVector apply_two(const TwoQubitOp& op, std::string_view mode_hi, std::string_view mode_lo,
                             const StateVector& s) {
  const std::size_t sh = s.bit_shift(s.mode_index(mode_hi));
  const std::size_t sl = s.bit_shift(s.mode_index(mode_lo));
  if (sh == sl) throw std::invalid_argument("two-qubit operator needs distinct modes");
  StateVector out = s;
  const std::size_t mh = std::size_t{1} << sh, ml = std::size_t{1} << sl;
  for (std::size_t i = 0; i < s.amps.size(); ++i) {
    if ((i & mh) || (i & ml)) continue;  // base index with both bits clear
    const std::array<std::size_t, 4> idx{i, i | ml, i | mh, i | mh | ml};
    std::array<cplx, 4> in;
    for (int k = 0; k < 4; ++k) in[k] = s.amps[idx[k]];
    for (int r = 0; r < 4; ++r) {
      cplx acc{};
      for (int c = 0; c < 4; ++c) acc += op(r, c) * in[c];
      out.amps[idx[r]] = acc;
    }
  }
  return out;
}

namespace detail {
inline std::pair<StateVector, double> finish_projection(StateVector&& applied) {
  const double p = norm2(applied);
  applied.norm_weight *= p;
  if (p < kEmptyTol) {
    applied.empty = true;
    std::fill(applied.amps.begin(), applied.amps.end(), cplx{});
    return {std::move(applied), std::max(p, 0.0)};
  }
  const double n = std::sqrt(p);
  for (auto& a : applied.amps) a /= n;
  return {std::move(applied), p};
}
}  // namespace detail

/// Project onto a Hermitian idempotent operator on one mode; returns the
/// renormalized state and the projection probability <s|P|s>.
inline std::pair<StateVector, double> project(const StateVector& s, const SingleQubitOp& p,
                                              std::string_view mode) {
  if (!p.is_projector()) throw std::invalid_argument("operator is not Hermitian idempotent");
  return detail::finish_projection(apply_single(p, mode, s));
}

inline std::pair<StateVector, double> project(const StateVector& s, const TwoQubitOp& p,
                                              std::string_view mode_hi, std::string_view mode_lo) {
  if (!p.is_projector()) throw std::invalid_argument("operator is not Hermitian idempotent");
  return detail::finish_projection(apply_two(p, mode_hi, mode_lo, s));
}

/// Remove a mode whose state is a fixed basis value (after a projection).
inline StateVector drop_mode(const StateVector& s, std::string_view mode, int kept_bit) {
  const std::size_t shift = s.bit_shift(s.mode_index(mode));
  const std::size_t idx = s.mode_index(mode);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < s.labels.size(); ++i)
    if (i != idx) labels.push_back(s.labels[i]);
  std::vector<cplx> amps(s.amps.size() / 2);
  for (std::size_t i = 0; i < s.amps.size(); ++i) {
    const std::size_t bit = (i >> shift) & 1u;
    if (static_cast<int>(bit) != kept_bit) {
      if (std::abs(s.amps[i]) > 1e-9)
        throw std::logic_error("drop_mode: discarded component is not null");
      continue;
    }
    const std::size_t low = i & ((std::size_t{1} << shift) - 1);
    const std::size_t high = (i >> (shift + 1)) << shift;
    amps[high | low] = s.amps[i];
  }
  StateVector out{std::move(labels), std::move(amps)};
  out.norm_weight = s.norm_weight;
  out.empty = s.empty;
  return out;
}

// Basis-change matrix: rows are the bras of the target basis, so (B * amps)
// gives the coefficients of the state in that basis.
enum class Basis { hv, pm, rl };

inline SingleQubitOp basis_change(Basis b) {
  constexpr double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
  SingleQubitOp out;
  switch (b) {
    case Basis::hv:
      out = SingleQubitOp::identity();
      break;
    case Basis::pm:
      out(0, 0) = inv_sqrt2; out(0, 1) = inv_sqrt2;
      out(1, 0) = inv_sqrt2; out(1, 1) = -inv_sqrt2;
      break;
    case Basis::rl:
      out(0, 0) = inv_sqrt2; out(0, 1) = cplx{0.0, -inv_sqrt2};
      out(1, 0) = inv_sqrt2; out(1, 1) = cplx{0.0, inv_sqrt2};
      break;
  }
  return out;
}

}  // namespace entbell
