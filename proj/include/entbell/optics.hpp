#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "entbell/qstate.hpp"

// Optical elements: half- and quarter-wave plates, linear polarizers, and the
// polarizing beamsplitter as a post-selected two-qubit parity check.
//
// Angle convention: an angle θ means a polarization rotation in real space
// (2θ on the Bloch sphere); a half-wave plate physically mounted at θ/2
// produces the rotation θ. All wave-plate arguments below are the physical
// mount angle in radians.

namespace entbell {

/// Half-wave plate with fast axis at physical angle φ:
/// [[cos2φ, sin2φ], [sin2φ, −cos2φ]]  (det = −1).
inline SingleQubitOp hwp(double physical_angle) {
  const double c = std::cos(2.0 * physical_angle);
  const double s = std::sin(2.0 * physical_angle);
  SingleQubitOp op;
  op(0, 0) = c;  op(0, 1) = s;
  op(1, 0) = s;  op(1, 1) = -c;
  return op;
}

/// Quarter-wave plate with fast axis at physical angle φ:
/// R(φ)·diag(i,1)·R(−φ). Eigenvalues {1, i}; at 45° maps |H> to a circular
/// state (|H>+i|V>)/√2 up to global phase.
inline SingleQubitOp qwp(double physical_angle) {
  const double c = std::cos(physical_angle);
  const double s = std::sin(physical_angle);
  const cplx i{0.0, 1.0};
  SingleQubitOp op;
  op(0, 0) = i * c * c + s * s;
  op(0, 1) = (i - 1.0) * c * s;
  op(1, 0) = op(0, 1);
  op(1, 1) = i * s * s + c * c;
  return op;
}

/// Rank-1 projector onto cosθ|H> + sinθ|V>; the perpendicular outcome is
/// polarizer_projector(θ + π/2).
inline SingleQubitOp polarizer_projector(double angle) {
  return outer_projector<2>({cplx{std::cos(angle), 0.0}, cplx{std::sin(angle), 0.0}});
}

struct PbsPorts {
  std::string in1, in2;
  std::string out1, out2;
};

// Even-parity projector in the H/V basis: diag(1,0,0,1).
inline TwoQubitOp even_parity_projector() {
  TwoQubitOp p;
  p(0, 0) = 1.0;
  p(3, 3) = 1.0;
  return p;
}

/// Polarizing beamsplitter under coincidence post-selection (one photon per
/// output port): keeps the even-parity H/V terms of the two input qubits,
/// renormalizes, and relabels the modes to the output ports with polarization
/// preserved. No reflection phase is tracked; any fixed phase is absorbed by
/// the preparation calibration. Returns the post-selected state and the
/// success probability.
inline std::pair<StateVector, double> pbs_parity_check(const StateVector& s, const PbsPorts& ports) {
  if (ports.out1 == ports.out2)
    throw std::invalid_argument("pbs output ports must be distinct");
  for (const auto& l : s.labels) {
    if ((l == ports.out1 && ports.out1 != ports.in1) || (l == ports.out2 && ports.out2 != ports.in2))
      throw std::invalid_argument("pbs output label '" + l + "' already present");
  }
  auto [post, p] = project(s, even_parity_projector(), ports.in1, ports.in2);
  post.labels[post.mode_index(ports.in1)] = ports.out1;
  post.labels[post.mode_index(ports.in2)] = ports.out2;
  return {std::move(post), p};
}

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace entbell
