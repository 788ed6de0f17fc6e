#include "strh2/bench.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "strh2/errors.hpp"
#include "strh2/linalg.hpp"

namespace strh2::bench {

namespace {

constexpr double kPi = 3.14159265358979323846;

RMat random_matrix(Index rows, Index cols, SplitMix64& rng) {
  RMat m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

/// Winding number of det(sE - A - e^{-tau s} A_tau) along the boundary of the
/// rectangle [0, re_max] x [-im_max, im_max], counted counterclockwise.
/// Zero means no characteristic roots inside.
int rectangle_winding(const StateSpaceFOM& fom, double re_max, double im_max) {
  auto det_at = [&](Complex s) {
    return Eigen::PartialPivLU<CMat>(fom.characteristic(s)).determinant();
  };

  std::vector<Complex> corners = {Complex(0.0, -im_max), Complex(re_max, -im_max),
                                  Complex(re_max, im_max), Complex(0.0, im_max),
                                  Complex(0.0, -im_max)};
  double total = 0.0;
  for (size_t e = 0; e + 1 < corners.size(); ++e) {
    int samples = 256;
    for (int attempt = 0; attempt < 6; ++attempt) {
      double acc = 0.0;
      bool resolved = true;
      Complex prev = det_at(corners[e]);
      for (int k = 1; k <= samples; ++k) {
        const double t = static_cast<double>(k) / samples;
        const Complex s = corners[e] + t * (corners[e + 1] - corners[e]);
        const Complex cur = det_at(s);
        const double darg = std::arg(cur / prev);
        if (std::abs(darg) > kPi / 2) {
          resolved = false;
          break;
        }
        acc += darg;
        prev = cur;
      }
      if (resolved) {
        total += acc;
        break;
      }
      samples *= 4;
      if (attempt == 5) throw StabilityCheckFailed();
    }
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

}  // namespace

StateSpaceFOM gen_random_stable(Index n, Index m, Index p, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  SplitMix64 rng(seed);
  const RMat g = random_matrix(n, n, rng);
  RMat a = 0.5 * (g - g.transpose());
  for (Index i = 0; i < n; ++i) a(i, i) -= rng.uniform(0.5, 2.5);

  StateSpaceFOM fom;
  fom.E = RMat::Identity(n, n);
  fom.A = a;
  fom.B = random_matrix(n, m, rng);
  fom.C = random_matrix(p, n, rng);

  Eigen::ComplexEigenSolver<CMat> es(a.cast<Complex>(), false);
  if (!(es.eigenvalues().real().maxCoeff() < 0.0)) throw UnstableSystem();
  return fom;
}

SecondOrderFOM gen_msd_chain(Index r_masses, double alpha, double beta, std::uint64_t seed) {
  if (r_masses < 1) throw std::invalid_argument("need at least one mass");
  if (!(alpha >= 0.0) || !(beta >= 0.0) || (alpha == 0.0 && beta == 0.0))
    throw std::invalid_argument("Rayleigh coefficients must be nonnegative and not both zero");
  (void)seed;  // chain data is fully deterministic

  SecondOrderFOM fom;
  fom.M = RMat::Identity(r_masses, r_masses);
  fom.K = RMat::Zero(r_masses, r_masses);
  for (Index i = 0; i < r_masses; ++i) {
    fom.K(i, i) = 2.0;
    if (i + 1 < r_masses) {
      fom.K(i, i + 1) = -1.0;
      fom.K(i + 1, i) = -1.0;
    }
  }
  fom.E = alpha * fom.M + beta * fom.K;
  fom.B = RMat::Zero(r_masses, 1);
  fom.B(r_masses - 1, 0) = 1.0;
  fom.C = RMat::Zero(1, r_masses);
  fom.C(0, 0) = 1.0;
  return fom;
}

PHModel gen_ph_random(Index n, Index m, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  SplitMix64 rng(seed);
  const RMat g = random_matrix(n, n, rng);
  const RMat g2 = random_matrix(n, n, rng);

  PHModel model;
  model.J = 0.5 * (g - g.transpose());
  model.R = g2 * g2.transpose() + 1e-6 * RMat::Identity(n, n);
  model.B = random_matrix(n, m, rng);
  model.validate();
  return model;
}

StateSpaceFOM gen_delay_fom(Index n, double tau, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");

  for (int attempt = 0; attempt < 10; ++attempt) {
    SplitMix64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt));
    const RMat g = random_matrix(n, n, rng);
    RMat a = 0.5 * (g - g.transpose());
    for (Index i = 0; i < n; ++i) a(i, i) -= rng.uniform(1.0, 3.0);

    StateSpaceFOM fom;
    fom.E = RMat::Identity(n, n);
    fom.A = a;
    fom.A_tau = random_matrix(n, n, rng);
    fom.A_tau *= 0.3 * a.norm() / fom.A_tau.norm();
    fom.tau = tau;
    fom.B = random_matrix(n, 1, rng);
    fom.C = random_matrix(1, n, rng);

    // sigma_min along the imaginary axis, then a winding count over the
    // right-half-plane zero bound.
    const double bound = a.norm() + fom.A_tau.norm() + 1.0;
    bool margin_ok = true;
    for (int k = 0; k <= 256 && margin_ok; ++k) {
      const double w = -bound + 2.0 * bound * k / 256;
      if (smallest_singular_value(fom.characteristic(Complex(0.0, w))) <= 1e-6) margin_ok = false;
    }
    if (!margin_ok) continue;
    try {
      if (rectangle_winding(fom, bound, bound) == 0) return fom;
    } catch (const StabilityCheckFailed&) {
      continue;
    }
  }
  throw StabilityCheckFailed();
}

}  // namespace strh2::bench
