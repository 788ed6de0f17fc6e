#pragma once

#include <cstdint>

#include "strh2/rng.hpp"
#include "strh2/sysmodel.hpp"

namespace strh2::bench {

/// A = Q - D with Q random skew-symmetric and D positive diagonal, so the
/// field of values (hence the spectrum) lies in the open left half-plane.
StateSpaceFOM gen_random_stable(Index n, Index m, Index p, std::uint64_t seed);

/// Mass-spring-damper chain with fixed ends, unit masses and springs,
/// Rayleigh damping E = alpha M + beta K, input at the last mass, position
/// output at the first.
SecondOrderFOM gen_msd_chain(Index r_masses, double alpha, double beta, std::uint64_t seed);

/// J random skew, R = G G^T + 1e-6 I, B random.
PHModel gen_ph_random(Index n, Index m, std::uint64_t seed);

/// Single-delay FOM with ||A_tau||_F = 0.3 ||A||_F; stability verified by a
/// winding-number count of det(sE - A - e^{-tau s} A_tau) around the right
/// half-plane zero bound (redraws internally up to 10 times).
StateSpaceFOM gen_delay_fom(Index n, double tau, std::uint64_t seed);

}  // namespace strh2::bench
