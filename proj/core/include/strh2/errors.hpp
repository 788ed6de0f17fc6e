#pragma once

#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>

namespace strh2 {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A(s) (or the characteristic matrix) is numerically singular at the
/// evaluation point; signals that s is at or next to a pole.
struct SingularAtPoint : Error {
  std::complex<double> point;
  explicit SingularAtPoint(std::complex<double> s)
      : Error(format(s)), point(s) {}
  static std::string format(std::complex<double> s) {
    std::ostringstream os;
    os << "matrix singular at s = " << s.real() << (s.imag() < 0 ? " - " : " + ")
       << std::abs(s.imag()) << "i";
    return os.str();
  }
};

struct NotDiagonalizable : Error {
  using Error::Error;
  NotDiagonalizable() : Error("pencil not diagonalizable within separation tolerance") {}
};

struct MoreThanTwoTerms : Error {
  MoreThanTwoTerms() : Error("more than two A-terms and not simultaneously diagonalizable") {}
};

struct RepeatedRoot : Error {
  using Error::Error;
  RepeatedRoot() : Error("quadratic factor has a (numerically) repeated root") {}
};

struct CrossIndexCollision : Error {
  CrossIndexCollision() : Error("factorization roots collide across indices") {}
};

struct DegenerateLeadingCoefficient : Error {
  DegenerateLeadingCoefficient() : Error("polynomial leading coefficient is (numerically) zero") {}
};

struct NoConvergence : Error {
  using Error::Error;
  NoConvergence() : Error("iteration did not converge") {}
};

struct BranchPointSingularity : Error {
  BranchPointSingularity() : Error("argument within tolerance of the Lambert-W branch point -1/e") {}
};

struct UnstablePole : Error {
  std::complex<double> pole;
  explicit UnstablePole(std::complex<double> lambda)
      : Error("pole with nonnegative real part: Re = " + std::to_string(lambda.real())),
        pole(lambda) {}
};

struct UnstableSystem : Error {
  using Error::Error;
  UnstableSystem() : Error("system has an eigenvalue with nonnegative real part") {}
};

struct NotASimpleZero : Error {
  NotASimpleZero() : Error("point is not a simple zero of the denominator") {}
};

struct DisjointnessViolation : Error {
  DisjointnessViolation() : Error("pole sets of different indices are not pairwise disjoint") {}
};

struct TruncationNotConverged : Error {
  TruncationNotConverged() : Error("delay branch window exceeded its cap before the tail rule was met") {}
};

struct UnsupportedStructure : Error {
  using Error::Error;
  UnsupportedStructure() : Error("unsupported structure tag") {}
};

struct StabilityCheckFailed : Error {
  StabilityCheckFailed() : Error("could not draw a verifiably stable delay system") {}
};

struct ParseError : Error {
  using Error::Error;
};

}  // namespace strh2
