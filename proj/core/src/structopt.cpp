#include "strh2/structopt.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "strh2/errors.hpp"
#include "strh2/linalg.hpp"

namespace strh2 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Structure structure_from_string(const std::string& name) {
  if (name == "unstructured") return Structure::Unstructured;
  if (name == "so" || name == "second-order") return Structure::SecondOrder;
  if (name == "ph") return Structure::PortHamiltonian;
  if (name == "delay") return Structure::Delay;
  throw UnsupportedStructure("unknown structure: " + name);
}

std::string structure_to_string(Structure s) {
  switch (s) {
    case Structure::Unstructured: return "unstructured";
    case Structure::SecondOrder: return "so";
    case Structure::PortHamiltonian: return "ph";
    case Structure::Delay: return "delay";
  }
  return "unstructured";
}

std::string termination_to_string(Termination t) {
  switch (t) {
    case Termination::GradientTolerance: return "gradient-tolerance";
    case Termination::MaxIterations: return "max-iterations";
    case Termination::LineSearchFailure: return "line-search-failure";
  }
  return "max-iterations";
}

ParamSepModel rom_param_sep(const RomVariant& rom) {
  return std::visit([](const auto& model) { return model.to_param_sep(); }, rom);
}

Parameterization::Parameterization(Structure structure, Index r, Index m, Index p, double tau,
                                   Index pairs)
    : structure_(structure), r_(r), m_(m), p_(p), tau_(tau) {
  if (r < 1 || m < 1 || p < 1) throw std::invalid_argument("r, m, p must all be >= 1");
  if (structure == Structure::Delay && !(tau > 0.0))
    throw std::invalid_argument("delay parameterization needs tau > 0");
  if (structure == Structure::PortHamiltonian && p != m)
    throw std::invalid_argument("pH models have p = m");
  pairs_ = pairs < 0 ? r / 2 : pairs;
  if (pairs_ < 0 || 2 * pairs_ > r) throw std::invalid_argument("invalid pair count");
  n_real_ = r - 2 * pairs_;
}

Index Parameterization::dim() const {
  switch (structure_) {
    case Structure::Unstructured:
      return pairs_ * (2 + 2 * m_ + 2 * p_) + n_real_ * (1 + m_ + p_);
    case Structure::SecondOrder:
      return 2 * r_ + r_ * m_ + p_ * r_;
    case Structure::PortHamiltonian:
      return r_ * (r_ - 1) / 2 + r_ * (r_ + 1) / 2 + r_ * m_;
    case Structure::Delay:
      return pairs_ * (4 + 2 * m_ + 2 * p_) + n_real_ * (2 + m_ + p_);
  }
  return 0;
}

namespace {

/// Reorders indices of a conjugate-closed spectrum into adjacent (upper, lower)
/// pairs followed by the real entries; throws when the set is not closed.
std::vector<Index> conjugate_pair_order(const CVec& values, Index expected_pairs, Index expected_real) {
  const Index n = values.size();
  const double tol = 1e-8 * std::max(1.0, values.cwiseAbs().maxCoeff());
  std::vector<Index> upper, real_idx;
  std::vector<bool> used(static_cast<size_t>(n), false);
  for (Index i = 0; i < n; ++i)
    if (std::abs(values(i).imag()) <= tol) {
      real_idx.push_back(i);
      used[static_cast<size_t>(i)] = true;
    }
  for (Index i = 0; i < n; ++i)
    if (!used[static_cast<size_t>(i)] && values(i).imag() > 0.0) upper.push_back(i);

  std::vector<Index> order;
  std::vector<bool> matched(static_cast<size_t>(n), false);
  for (Index i : upper) {
    Index partner = -1;
    for (Index j = 0; j < n; ++j) {
      if (used[static_cast<size_t>(j)] || matched[static_cast<size_t>(j)] || j == i) continue;
      if (std::abs(values(j) - std::conj(values(i))) <= 10 * tol) {
        partner = j;
        break;
      }
    }
    if (partner < 0) throw std::invalid_argument("spectrum is not closed under conjugation");
    matched[static_cast<size_t>(i)] = matched[static_cast<size_t>(partner)] = true;
    order.push_back(i);
    order.push_back(partner);
  }
  std::sort(real_idx.begin(), real_idx.end(),
            [&](Index a, Index b) { return values(a).real() < values(b).real(); });
  for (Index i : real_idx) order.push_back(i);
  if (static_cast<Index>(order.size()) != n ||
      static_cast<Index>(upper.size()) != expected_pairs ||
      static_cast<Index>(real_idx.size()) != expected_real)
    throw std::invalid_argument("spectrum does not fit the conjugate-paired layout");
  return order;
}

DiagonalStructuredROM make_unstructured_rom(const CVec& poles, const CMat& b, const CMat& c) {
  DiagonalStructuredROM rom;
  const Index r = poles.size();
  rom.a_terms.emplace_back(CoefficientFunction::monomial(1), CVec::Ones(r));
  rom.a_terms.emplace_back(CoefficientFunction::constant(1.0), CVec(-poles));
  rom.B = b;
  rom.C = c;
  return rom;
}

}  // namespace

RVec Parameterization::pack(const RomVariant& model) const {
  RVec theta(dim());
  Index o = 0;

  switch (structure_) {
    case Structure::Unstructured: {
      const auto& rom = std::get<DiagonalStructuredROM>(model);
      if (rom.order() != r_ || rom.inputs() != m_ || rom.outputs() != p_)
        throw std::invalid_argument("dimension mismatch");
      CVec poles(r_);
      for (Index l = 0; l < r_; ++l) {
        std::vector<Complex> coeffs;
        if (!rom.denominator(l).polynomial_coefficients(&coeffs) || coeffs.size() != 2 ||
            std::abs(coeffs[1] - Complex(1.0, 0.0)) > 1e-12)
          throw std::invalid_argument("denominators must be monic s - lambda");
        poles(l) = -coeffs[0];
      }
      const std::vector<Index> order = conjugate_pair_order(poles, pairs_, n_real_);
      for (Index t = 0; t < pairs_; ++t) {
        const Index l = order[static_cast<size_t>(2 * t)];
        const Complex lambda = poles(l);
        if (!(lambda.real() < 0.0)) throw UnstablePole(lambda);
        theta(o++) = std::log(-lambda.real());
        theta(o++) = lambda.imag();
        const CVec bv = rom.b(l);
        const CVec cv = rom.c(l);
        for (Index q = 0; q < m_; ++q) {
          theta(o++) = bv(q).real();
          theta(o++) = bv(q).imag();
        }
        for (Index q = 0; q < p_; ++q) {
          theta(o++) = cv(q).real();
          theta(o++) = cv(q).imag();
        }
      }
      for (Index rr = 0; rr < n_real_; ++rr) {
        const Index l = order[static_cast<size_t>(2 * pairs_ + rr)];
        if (!(poles(l).real() < 0.0)) throw UnstablePole(poles(l));
        theta(o++) = std::log(-poles(l).real());
        const CVec bv = rom.b(l);
        const CVec cv = rom.c(l);
        for (Index q = 0; q < m_; ++q) theta(o++) = bv(q).real();
        for (Index q = 0; q < p_; ++q) theta(o++) = cv(q).real();
      }
      break;
    }
    case Structure::SecondOrder: {
      const auto& rom = std::get<SecondOrderROM>(model);
      if (rom.order() != r_ || rom.inputs() != m_ || rom.outputs() != p_)
        throw std::invalid_argument("dimension mismatch");
      rom.validate();
      for (Index l = 0; l < r_; ++l) theta(o++) = std::log(rom.damping(l));
      for (Index l = 0; l < r_; ++l) theta(o++) = std::log(rom.stiffness(l));
      for (Index i = 0; i < r_; ++i)
        for (Index j = 0; j < m_; ++j) theta(o++) = rom.B(i, j);
      for (Index i = 0; i < p_; ++i)
        for (Index j = 0; j < r_; ++j) theta(o++) = rom.C(i, j);
      break;
    }
    case Structure::PortHamiltonian: {
      const auto& rom = std::get<PHModel>(model);
      if (rom.order() != r_ || rom.inputs() != m_)
        throw std::invalid_argument("dimension mismatch");
      for (Index i = 0; i < r_; ++i)
        for (Index j = 0; j < i; ++j) theta(o++) = rom.J(i, j);
      const RMat shifted = rom.R - 1e-8 * RMat::Identity(r_, r_);
      Eigen::LLT<RMat> llt(shifted);
      if (llt.info() != Eigen::Success)
        throw std::invalid_argument("R - 1e-8 I must be positive definite to pack");
      const RMat l = llt.matrixL();
      for (Index i = 0; i < r_; ++i)
        for (Index j = 0; j <= i; ++j) theta(o++) = l(i, j);
      for (Index i = 0; i < r_; ++i)
        for (Index j = 0; j < m_; ++j) theta(o++) = rom.B(i, j);
      break;
    }
    case Structure::Delay: {
      const auto& rom = std::get<DelayROM>(model);
      if (rom.order() != r_ || rom.inputs() != m_ || rom.outputs() != p_ ||
          std::abs(rom.tau - tau_) > 1e-14)
        throw std::invalid_argument("dimension or delay mismatch");
      const std::vector<Index> order = conjugate_pair_order(rom.mu, pairs_, n_real_);
      for (Index t = 0; t < pairs_; ++t) {
        const Index l = order[static_cast<size_t>(2 * t)];
        if (!(rom.mu(l).real() < 0.0)) throw UnstablePole(rom.mu(l));
        theta(o++) = std::log(-rom.mu(l).real());
        theta(o++) = rom.mu(l).imag();
        theta(o++) = rom.sigma(l).real();
        theta(o++) = rom.sigma(l).imag();
        const CVec bv = rom.B.row(l).adjoint();
        const CVec cv = rom.C.col(l);
        for (Index q = 0; q < m_; ++q) {
          theta(o++) = bv(q).real();
          theta(o++) = bv(q).imag();
        }
        for (Index q = 0; q < p_; ++q) {
          theta(o++) = cv(q).real();
          theta(o++) = cv(q).imag();
        }
      }
      for (Index rr = 0; rr < n_real_; ++rr) {
        const Index l = order[static_cast<size_t>(2 * pairs_ + rr)];
        if (!(rom.mu(l).real() < 0.0)) throw UnstablePole(rom.mu(l));
        theta(o++) = std::log(-rom.mu(l).real());
        theta(o++) = rom.sigma(l).real();
        for (Index q = 0; q < m_; ++q) theta(o++) = rom.B(l, q).real();
        for (Index q = 0; q < p_; ++q) theta(o++) = rom.C(q, l).real();
      }
      break;
    }
  }
  if (o != dim()) throw std::logic_error("pack layout error");
  return theta;
}

RomVariant Parameterization::unpack(const RVec& theta) const {
  if (theta.size() != dim()) throw std::invalid_argument("theta dimension mismatch");
  Index o = 0;

  switch (structure_) {
    case Structure::Unstructured: {
      CVec poles(r_);
      CMat b = CMat::Zero(r_, m_);
      CMat c = CMat::Zero(p_, r_);
      for (Index t = 0; t < pairs_; ++t) {
        const Index l = 2 * t;
        const double u = theta(o++);
        const double v = theta(o++);
        poles(l) = Complex(-std::exp(u), v);
        poles(l + 1) = std::conj(poles(l));
        for (Index q = 0; q < m_; ++q) {
          const Complex bq(theta(o), theta(o + 1));
          o += 2;
          b(l, q) = std::conj(bq);  // row l of B is b_l^*
          b(l + 1, q) = bq;
        }
        for (Index q = 0; q < p_; ++q) {
          const Complex cq(theta(o), theta(o + 1));
          o += 2;
          c(q, l) = cq;
          c(q, l + 1) = std::conj(cq);
        }
      }
      for (Index rr = 0; rr < n_real_; ++rr) {
        const Index l = 2 * pairs_ + rr;
        poles(l) = Complex(-std::exp(theta(o++)), 0.0);
        for (Index q = 0; q < m_; ++q) b(l, q) = theta(o++);
        for (Index q = 0; q < p_; ++q) c(q, l) = theta(o++);
      }
      return make_unstructured_rom(poles, b, c);
    }
    case Structure::SecondOrder: {
      SecondOrderROM rom;
      rom.damping.resize(r_);
      rom.stiffness.resize(r_);
      rom.B.resize(r_, m_);
      rom.C.resize(p_, r_);
      for (Index l = 0; l < r_; ++l) rom.damping(l) = std::exp(theta(o++));
      for (Index l = 0; l < r_; ++l) rom.stiffness(l) = std::exp(theta(o++));
      for (Index i = 0; i < r_; ++i)
        for (Index j = 0; j < m_; ++j) rom.B(i, j) = theta(o++);
      for (Index i = 0; i < p_; ++i)
        for (Index j = 0; j < r_; ++j) rom.C(i, j) = theta(o++);
      return rom;
    }
    case Structure::PortHamiltonian: {
      PHModel rom;
      rom.J = RMat::Zero(r_, r_);
      RMat l = RMat::Zero(r_, r_);
      rom.B.resize(r_, m_);
      for (Index i = 0; i < r_; ++i)
        for (Index j = 0; j < i; ++j) {
          rom.J(i, j) = theta(o);
          rom.J(j, i) = -theta(o);
          ++o;
        }
      for (Index i = 0; i < r_; ++i)
        for (Index j = 0; j <= i; ++j) l(i, j) = theta(o++);
      rom.R = l * l.transpose() + 1e-8 * RMat::Identity(r_, r_);
      for (Index i = 0; i < r_; ++i)
        for (Index j = 0; j < m_; ++j) rom.B(i, j) = theta(o++);
      return rom;
    }
    case Structure::Delay: {
      DelayROM rom;
      rom.tau = tau_;
      rom.mu.resize(r_);
      rom.sigma.resize(r_);
      rom.B = CMat::Zero(r_, m_);
      rom.C = CMat::Zero(p_, r_);
      for (Index t = 0; t < pairs_; ++t) {
        const Index l = 2 * t;
        const double u = theta(o++);
        const double v = theta(o++);
        rom.mu(l) = Complex(-std::exp(u), v);
        rom.mu(l + 1) = std::conj(rom.mu(l));
        rom.sigma(l) = Complex(theta(o), theta(o + 1));
        o += 2;
        rom.sigma(l + 1) = std::conj(rom.sigma(l));
        for (Index q = 0; q < m_; ++q) {
          const Complex bq(theta(o), theta(o + 1));
          o += 2;
          rom.B(l, q) = std::conj(bq);
          rom.B(l + 1, q) = bq;
        }
        for (Index q = 0; q < p_; ++q) {
          const Complex cq(theta(o), theta(o + 1));
          o += 2;
          rom.C(q, l) = cq;
          rom.C(q, l + 1) = std::conj(cq);
        }
      }
      for (Index rr = 0; rr < n_real_; ++rr) {
        const Index l = 2 * pairs_ + rr;
        rom.mu(l) = Complex(-std::exp(theta(o++)), 0.0);
        rom.sigma(l) = Complex(theta(o++), 0.0);
        for (Index q = 0; q < m_; ++q) rom.B(l, q) = theta(o++);
        for (Index q = 0; q < p_; ++q) rom.C(q, l) = theta(o++);
      }
      return rom;
    }
  }
  throw std::logic_error("unreachable");
}

RVec Parameterization::chain_gradient(const RVec& theta, const GradientBundle& bundle) const {
  RVec grad = RVec::Zero(dim());
  Index o = 0;

  auto re2 = [](Complex z) { return 2.0 * z.real(); };
  auto im2 = [](Complex z) { return 2.0 * z.imag(); };

  switch (structure_) {
    case Structure::Unstructured: {
      // a_terms = [s I, 1 * (-Lambda)] so d/d(conj lambda_l) = -dA[1](l,l).
      const CMat& da = bundle.dA[1];
      const CMat& db = bundle.dB[0];
      const CMat& dc = bundle.dC[0];
      for (Index t = 0; t < pairs_; ++t) {
        const Index l = 2 * t, l2 = 2 * t + 1;
        const Complex g1 = -da(l, l), g2 = -da(l2, l2);
        const double eu = std::exp(theta(o));
        grad(o++) = -eu * (re2(g1) + re2(g2));
        grad(o++) = im2(g1) - im2(g2);
        for (Index q = 0; q < m_; ++q) {
          grad(o++) = re2(db(l, q)) + re2(db(l2, q));
          grad(o++) = -im2(db(l, q)) + im2(db(l2, q));
        }
        for (Index q = 0; q < p_; ++q) {
          grad(o++) = re2(dc(q, l)) + re2(dc(q, l2));
          grad(o++) = im2(dc(q, l)) - im2(dc(q, l2));
        }
      }
      for (Index rr = 0; rr < n_real_; ++rr) {
        const Index l = 2 * pairs_ + rr;
        const double eu = std::exp(theta(o));
        grad(o++) = -eu * re2(-da(l, l));
        for (Index q = 0; q < m_; ++q) grad(o++) = re2(db(l, q));
        for (Index q = 0; q < p_; ++q) grad(o++) = re2(dc(q, l));
      }
      break;
    }
    case Structure::SecondOrder: {
      for (Index l = 0; l < r_; ++l) grad(o + l) = re2(bundle.dA[1](l, l)) * std::exp(theta(o + l));
      o += r_;
      for (Index l = 0; l < r_; ++l) grad(o + l) = re2(bundle.dA[2](l, l)) * std::exp(theta(o + l));
      o += r_;
      for (Index i = 0; i < r_; ++i)
        for (Index j = 0; j < m_; ++j) grad(o++) = re2(bundle.dB[0](i, j));
      for (Index i = 0; i < p_; ++i)
        for (Index j = 0; j < r_; ++j) grad(o++) = re2(bundle.dC[0](i, j));
      break;
    }
    case Structure::PortHamiltonian: {
      const RMat djr = 2.0 * bundle.dA[1].real();
      const RMat dbr = 2.0 * (bundle.dB[0] + bundle.dC[0].transpose()).real();
      for (Index i = 0; i < r_; ++i)
        for (Index j = 0; j < i; ++j) grad(o++) = djr(i, j) - djr(j, i);
      // Rebuild L from theta to chain through R = L L^T + eps I.
      RMat l = RMat::Zero(r_, r_);
      {
        Index lo = r_ * (r_ - 1) / 2;
        for (Index i = 0; i < r_; ++i)
          for (Index j = 0; j <= i; ++j) l(i, j) = theta(lo++);
      }
      const RMat sum = (djr + djr.transpose()) * l;
      for (Index i = 0; i < r_; ++i)
        for (Index j = 0; j <= i; ++j) grad(o++) = -sum(i, j);
      for (Index i = 0; i < r_; ++i)
        for (Index j = 0; j < m_; ++j) grad(o++) = dbr(i, j);
      break;
    }
    case Structure::Delay: {
      const CMat& dmu = bundle.dA[1];
      const CMat& dsg = bundle.dA[2];
      const CMat& db = bundle.dB[0];
      const CMat& dc = bundle.dC[0];
      for (Index t = 0; t < pairs_; ++t) {
        const Index l = 2 * t, l2 = 2 * t + 1;
        const Complex g1 = dmu(l, l), g2 = dmu(l2, l2);
        const double eu = std::exp(theta(o));
        grad(o++) = -eu * (re2(g1) + re2(g2));
        grad(o++) = im2(g1) - im2(g2);
        grad(o++) = re2(dsg(l, l)) + re2(dsg(l2, l2));
        grad(o++) = im2(dsg(l, l)) - im2(dsg(l2, l2));
        for (Index q = 0; q < m_; ++q) {
          grad(o++) = re2(db(l, q)) + re2(db(l2, q));
          grad(o++) = -im2(db(l, q)) + im2(db(l2, q));
        }
        for (Index q = 0; q < p_; ++q) {
          grad(o++) = re2(dc(q, l)) + re2(dc(q, l2));
          grad(o++) = im2(dc(q, l)) - im2(dc(q, l2));
        }
      }
      for (Index rr = 0; rr < n_real_; ++rr) {
        const Index l = 2 * pairs_ + rr;
        const double eu = std::exp(theta(o));
        grad(o++) = -eu * re2(dmu(l, l));
        grad(o++) = re2(dsg(l, l));
        for (Index q = 0; q < m_; ++q) grad(o++) = re2(db(l, q));
        for (Index q = 0; q < p_; ++q) grad(o++) = re2(dc(q, l));
      }
      break;
    }
  }
  if (o != dim()) throw std::logic_error("chain layout error");
  return grad;
}

RVec Parameterization::initial_theta(double band_lo, double band_hi, SplitMix64& rng) const {
  band_lo = std::max(band_lo, 1e-3);
  band_hi = std::max(band_hi, band_lo * (1.0 + 1e-6));
  const double log_lo = std::log(band_lo), log_hi = std::log(band_hi);
  const Index slots = pairs_ + n_real_;
  auto magnitude = [&](Index t) {
    const double frac = slots > 1 ? static_cast<double>(t) / (slots - 1) : 0.5;
    return std::exp(log_lo + frac * (log_hi - log_lo) + 0.3 * rng.normal());
  };

  RVec theta(dim());
  Index o = 0;
  switch (structure_) {
    case Structure::Unstructured: {
      for (Index t = 0; t < pairs_; ++t) {
        const double rho = magnitude(t);
        const double angle = rng.uniform(0.25, 1.35);  // off the axes
        theta(o++) = std::log(rho * std::cos(angle));
        theta(o++) = rho * std::sin(angle);
        for (Index q = 0; q < 2 * (m_ + p_); ++q) theta(o++) = rng.normal();
      }
      for (Index rr = 0; rr < n_real_; ++rr) {
        theta(o++) = std::log(magnitude(pairs_ + rr));
        for (Index q = 0; q < m_ + p_; ++q) theta(o++) = rng.normal();
      }
      break;
    }
    case Structure::SecondOrder: {
      for (Index l = 0; l < r_; ++l) {
        const double omega = magnitude(l % slots);
        const double zeta = rng.uniform(0.2, 1.2);
        theta(l) = std::log(2.0 * zeta * omega);
        theta(r_ + l) = std::log(omega * omega);
      }
      o = 2 * r_;
      for (Index q = 0; q < r_ * m_ + p_ * r_; ++q) theta(o++) = rng.normal();
      break;
    }
    case Structure::PortHamiltonian: {
      const double mid = std::exp(0.5 * (log_lo + log_hi));
      for (Index q = 0; q < r_ * (r_ - 1) / 2; ++q) theta(o++) = mid * rng.normal();
      for (Index i = 0; i < r_; ++i)
        for (Index j = 0; j <= i; ++j)
          theta(o++) = (i == j) ? std::sqrt(magnitude(i % slots)) : 0.3 * rng.normal();
      for (Index q = 0; q < r_ * m_; ++q) theta(o++) = rng.normal();
      break;
    }
    case Structure::Delay: {
      for (Index t = 0; t < pairs_; ++t) {
        const double rho = magnitude(t);
        const double angle = rng.uniform(0.25, 1.35);
        theta(o++) = std::log(rho * std::cos(angle));
        theta(o++) = rho * std::sin(angle);
        theta(o++) = 0.1 * rho * rng.normal();
        theta(o++) = 0.1 * rho * rng.normal();
        for (Index q = 0; q < 2 * (m_ + p_); ++q) theta(o++) = rng.normal();
      }
      for (Index rr = 0; rr < n_real_; ++rr) {
        const double rho = magnitude(pairs_ + rr);
        theta(o++) = std::log(rho);
        theta(o++) = 0.1 * rho * rng.normal();
        for (Index q = 0; q < m_ + p_; ++q) theta(o++) = rng.normal();
      }
      break;
    }
  }
  return theta;
}

RVec Parameterization::gauge_balanced(RVec theta) const {
  auto balance_block = [&](Index b_off, Index c_off, Index nb, Index nc) {
    double bn = 0.0, cn = 0.0;
    for (Index q = 0; q < nb; ++q) bn += theta(b_off + q) * theta(b_off + q);
    for (Index q = 0; q < nc; ++q) cn += theta(c_off + q) * theta(c_off + q);
    bn = std::sqrt(bn);
    cn = std::sqrt(cn);
    if (!(bn > 1e-150) || !(cn > 1e-150)) return;
    const double s = std::sqrt(cn / bn);
    for (Index q = 0; q < nb; ++q) theta(b_off + q) *= s;
    for (Index q = 0; q < nc; ++q) theta(c_off + q) /= s;
  };

  switch (structure_) {
    case Structure::Unstructured: {
      Index o = 0;
      for (Index t = 0; t < pairs_; ++t) {
        balance_block(o + 2, o + 2 + 2 * m_, 2 * m_, 2 * p_);
        o += 2 + 2 * m_ + 2 * p_;
      }
      for (Index rr = 0; rr < n_real_; ++rr) {
        balance_block(o + 1, o + 1 + m_, m_, p_);
        o += 1 + m_ + p_;
      }
      break;
    }
    case Structure::SecondOrder: {
      // rows of B against columns of C, index by index
      for (Index l = 0; l < r_; ++l) {
        double bn = 0.0, cn = 0.0;
        for (Index j = 0; j < m_; ++j) bn += std::pow(theta(2 * r_ + l * m_ + j), 2);
        for (Index i = 0; i < p_; ++i) cn += std::pow(theta(2 * r_ + r_ * m_ + i * r_ + l), 2);
        bn = std::sqrt(bn);
        cn = std::sqrt(cn);
        if (!(bn > 1e-150) || !(cn > 1e-150)) continue;
        const double s = std::sqrt(cn / bn);
        for (Index j = 0; j < m_; ++j) theta(2 * r_ + l * m_ + j) *= s;
        for (Index i = 0; i < p_; ++i) theta(2 * r_ + r_ * m_ + i * r_ + l) /= s;
      }
      break;
    }
    case Structure::PortHamiltonian:
      break;  // B enters both port maps; no scale orbit
    case Structure::Delay: {
      Index o = 0;
      for (Index t = 0; t < pairs_; ++t) {
        balance_block(o + 4, o + 4 + 2 * m_, 2 * m_, 2 * p_);
        o += 4 + 2 * m_ + 2 * p_;
      }
      for (Index rr = 0; rr < n_real_; ++rr) {
        balance_block(o + 2, o + 2 + m_, m_, p_);
        o += 2 + m_ + p_;
      }
      break;
    }
  }
  return theta;
}

namespace {

void check_feasible(const RomVariant& model) {
  std::visit(
      [](const auto& rom) {
        using T = std::decay_t<decltype(rom)>;
        if constexpr (std::is_same_v<T, DelayROM>) {
          rom.validate(2);
        } else {
          rom.validate();
        }
      },
      model);
}

}  // namespace

namespace {

/// Levenberg-damped Newton iteration on the stationarity system grad J = 0.
/// Works on the gradient map directly, so it is limited by the precision of
/// the gradient (absolute ~1e-15), not by eps * J like cost-decrease searches.
/// Returns true when the gradient tolerance was reached.
bool newton_polish(const Parameterization& param,
                   const std::function<bool(const RVec&, double&, RVec&)>& eval_full, RVec& theta,
                   double& cost, RVec& grad, const MinimizeOptions& options) {
  const Index n = theta.size();
  double mu = 1e-8;

  // Enter (and stay) on the balanced residue gauge: the curvature spread of
  // the unbalanced orbit representative can reach (||c||/||b||)^2.
  {
    RVec balanced = param.gauge_balanced(theta);
    double cost_b;
    RVec grad_b;
    if (eval_full(balanced, cost_b, grad_b)) {
      theta = std::move(balanced);
      cost = cost_b;
      grad = std::move(grad_b);
    }
  }

  for (int outer = 0; outer < options.polish_iterations; ++outer) {
    if (grad.norm() < options.grad_tol) return true;

    // Central-difference Hessian column by column.
    RMat hess(n, n);
    bool ok = true;
    for (Index t = 0; t < n && ok; ++t) {
      const double step = 1e-6 * std::max(1.0, std::abs(theta(t)));
      RVec plus = theta, minus = theta;
      plus(t) += step;
      minus(t) -= step;
      double cp, cm;
      RVec gp, gm;
      ok = eval_full(plus, cp, gp) && eval_full(minus, cm, gm);
      if (ok) hess.col(t) = (gp - gm) / (2.0 * step);
    }
    if (!ok) return false;
    hess = 0.5 * (hess + hess.transpose());
    const double scale = std::max(hess.norm(), 1e-12);

    bool stepped = false;
    for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
      const RMat damped = hess + mu * scale * RMat::Identity(n, n);
      RVec delta = damped.ldlt().solve(-grad);
      if (!delta.allFinite()) {
        mu *= 10.0;
        continue;
      }
      // Backtrack along the Newton direction first: third-order valley
      // coupling inflates the stiff gradient quadratically in the step, so a
      // shortened step keeps the linear progress.
      for (int halving = 0; halving < 10 && !stepped; ++halving) {
        const RVec candidate = theta + delta;
        double cost_new;
        RVec grad_new;
        if (eval_full(candidate, cost_new, grad_new) && grad_new.norm() < grad.norm()) {
          theta = param.gauge_balanced(candidate);
          if (!eval_full(theta, cost_new, grad_new)) {
            theta = candidate;
            eval_full(theta, cost_new, grad_new);
          }
          cost = cost_new;
          grad = grad_new;
          mu = std::max(mu / 10.0, 1e-14);
          stepped = true;
        } else {
          delta *= 0.5;
        }
      }
      if (!stepped) mu *= 10.0;
    }
    if (!stepped) return grad.norm() < options.grad_tol;
  }
  return grad.norm() < options.grad_tol;
}

}  // namespace

OptimizeResult minimize(const TransferEvaluator& h, const Parameterization& param,
                        const RVec& theta0, const FrequencyGrid& grid,
                        const MinimizeOptions& options) {
  grid.validate();
  const std::vector<CMat> h_samples = eval_on_grid(h, grid);

  auto eval_full = [&](const RVec& th, double& cost, RVec& grad) -> bool {
    try {
      const RomVariant model = param.unpack(th);
      check_feasible(model);
      const GradientBundle bundle = gradients(h_samples, rom_param_sep(model), grid);
      cost = bundle.cost;
      grad = param.chain_gradient(th, bundle);
      return std::isfinite(cost);
    } catch (const Error&) {
      return false;
    }
  };
  auto eval_cost = [&](const RVec& th) -> double {
    try {
      const RomVariant model = param.unpack(th);
      check_feasible(model);
      const double cost = quadrature_cost(h_samples, rom_param_sep(model), grid);
      return std::isfinite(cost) ? cost : kInf;
    } catch (const Error&) {
      return kInf;
    }
  };

  RVec theta = theta0;
  double cost = 0.0;
  RVec grad;
  if (!eval_full(theta, cost, grad))
    throw std::invalid_argument("initial point is infeasible");

  const Index n = param.dim();
  RMat hessian_inv = RMat::Identity(n, n);
  bool hessian_fresh = true;

  OptimizeResult result;
  result.trace.push_back({0, cost, grad.norm(), 0.0});
  result.termination = Termination::MaxIterations;

  int stagnant = 0;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (grad.norm() < options.grad_tol) {
      result.termination = Termination::GradientTolerance;
      break;
    }
    // Progress below the cost noise floor cannot be certified by Armijo;
    // hand over to the stationarity polish.
    if (stagnant >= 5) break;

    RVec direction = options.bfgs ? RVec(-(hessian_inv * grad)) : RVec(-grad);
    double slope = grad.dot(direction);
    if (!(slope < 0.0)) {
      hessian_inv.setIdentity();
      hessian_fresh = true;
      direction = -grad;
      slope = grad.dot(direction);
    }

    double step = 1.0;
    bool accepted = false;
    RVec theta_new;
    double cost_new = 0.0;
    for (int halving = 0; halving < options.max_halvings; ++halving) {
      theta_new = theta + step * direction;
      cost_new = eval_cost(theta_new);
      if (cost_new <= cost + options.armijo_c1 * step * slope) {
        accepted = true;
        break;
      }
      step *= options.backtrack;
    }
    if (!accepted) {
      result.termination = Termination::LineSearchFailure;
      break;
    }

    RVec grad_new;
    double cost_check = 0.0;
    if (!eval_full(theta_new, cost_check, grad_new)) {
      result.termination = Termination::LineSearchFailure;
      break;
    }

    if (options.bfgs) {
      const RVec s = theta_new - theta;
      const RVec y = grad_new - grad;
      const double ys = y.dot(s);
      if (ys > 1e-12 * y.norm() * s.norm()) {
        if (hessian_fresh) {
          hessian_inv = (ys / y.squaredNorm()) * RMat::Identity(n, n);
          hessian_fresh = false;
        }
        const double rho = 1.0 / ys;
        const RMat outer = RMat::Identity(n, n) - rho * s * y.transpose();
        hessian_inv = outer * hessian_inv * outer.transpose() + rho * s * s.transpose();
      } else {
        hessian_inv.setIdentity();
        hessian_fresh = true;
      }
    }

    if (cost - cost_new <= 1e3 * 2.2e-16 * (1.0 + std::abs(cost)))
      ++stagnant;
    else
      stagnant = 0;

    theta = theta_new;
    cost = cost_new;
    grad = grad_new;
    result.trace.push_back({it + 1, cost, grad.norm(), step});
  }

  if (grad.norm() < options.grad_tol) result.termination = Termination::GradientTolerance;

  if (options.polish && grad.norm() >= options.grad_tol) {
    if (newton_polish(param, eval_full, theta, cost, grad, options))
      result.termination = Termination::GradientTolerance;
  }

  result.model = param.unpack(theta);
  result.final_cost = cost;
  result.final_grad_norm = grad.norm();
  result.iterations = static_cast<int>(result.trace.size()) - 1;
  return result;
}

OptimizeResult minimize_restarts(const TransferEvaluator& h, const Parameterization& param,
                                 const FrequencyGrid& grid, const MinimizeOptions& options,
                                 const RestartOptions& restart_options) {
  // Conjugate-closed spectra of real systems split into layout components
  // (pair counts); sweep them across restarts so the driver can reach optima
  // with real poles as well as paired ones.
  std::vector<Parameterization> layouts;
  if (param.structure() == Structure::Unstructured || param.structure() == Structure::Delay) {
    for (Index pairs = param.order() / 2; pairs >= 0; --pairs)
      layouts.emplace_back(param.structure(), param.order(), param.inputs(), param.outputs(),
                           param.tau(), pairs);
  } else {
    layouts.push_back(param);
  }

  bool have_best = false, have_converged = false;
  OptimizeResult best;
  for (int k = 0; k < restart_options.restarts; ++k) {
    const Parameterization& layout = layouts[static_cast<size_t>(k) % layouts.size()];
    SplitMix64 rng(restart_options.seed + 0x517cc1b727220a95ULL * static_cast<std::uint64_t>(k + 1));
    const RVec theta0 = layout.initial_theta(restart_options.band_lo, restart_options.band_hi, rng);
    OptimizeResult run;
    try {
      run = minimize(h, layout, theta0, grid, options);
    } catch (const std::invalid_argument&) {
      continue;  // infeasible draw
    }
    const bool converged = run.termination == Termination::GradientTolerance;
    const bool better =
        !have_best || (converged && !have_converged) ||
        (converged == have_converged && run.final_cost < best.final_cost);
    if (better) {
      best = std::move(run);
      have_best = true;
      have_converged = converged;
    }
  }
  if (!have_best) throw NoConvergence("no restart produced a feasible run");
  return best;
}

std::pair<double, double> spectral_band(const StateSpaceFOM& fom) {
  const PivotedLU lu(fom.E.cast<Complex>());
  Eigen::ComplexEigenSolver<CMat> es(lu.solve(fom.A.cast<Complex>()), false);
  const RVec mags = es.eigenvalues().cwiseAbs();
  double lo = mags.minCoeff(), hi = mags.maxCoeff();
  lo = std::max(lo, 1e-3 * std::max(hi, 1.0));
  return {lo, hi};
}

std::pair<double, double> spectral_band(const SecondOrderFOM& fom) {
  // Quadratic pencil magnitudes via the companion linearization.
  const Index n = fom.order();
  CMat lin = CMat::Zero(2 * n, 2 * n);
  lin.topRightCorner(n, n) = CMat::Identity(n, n);
  const PivotedLU mlu(fom.M.cast<Complex>());
  lin.bottomLeftCorner(n, n) = -mlu.solve(fom.K.cast<Complex>());
  lin.bottomRightCorner(n, n) = -mlu.solve(fom.E.cast<Complex>());
  Eigen::ComplexEigenSolver<CMat> es(lin, false);
  const RVec mags = es.eigenvalues().cwiseAbs();
  double lo = mags.minCoeff(), hi = mags.maxCoeff();
  lo = std::max(lo, 1e-3 * std::max(hi, 1.0));
  return {lo, hi};
}

}  // namespace strh2
