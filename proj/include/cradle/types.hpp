#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cradle {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Coefficients with magnitude at or below this are treated as exactly zero.
inline constexpr double kFreezeThreshold = 1e-10;
// Adjacent eigenvalues closer than this fraction of the spectral spread are
// rejected as degenerate.
inline constexpr double kDegeneracyRatio = 1e-10;

// ---------------------------------------------------------------------------
// Errors. InputError covers malformed or out-of-contract inputs, NumericError
// covers well-formed inputs the machinery cannot handle (degeneracy,
// singular transforms). The CLI maps them to exit codes 2 and 1.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public InputError {
 public:
  using InputError::InputError;
};

class NotUnitary : public InputError {
 public:
  using InputError::InputError;
};

class InvalidAnchor : public InputError {
 public:
  using InputError::InputError;
};

class InvalidProfile : public InputError {
 public:
  using InputError::InputError;
};

class InvalidInstance : public InputError {
 public:
  using InputError::InputError;
};

class DegenerateSpectrum : public NumericError {
 public:
  DegenerateSpectrum(Index lower, Index upper, double gap)
      : NumericError("degenerate spectrum: eigenvalues " + std::to_string(lower) + " and " +
                     std::to_string(upper) + " are separated by " + std::to_string(gap)),
        lower_(lower),
        upper_(upper),
        gap_(gap) {}

  Index lower() const { return lower_; }
  Index upper() const { return upper_; }
  double gap() const { return gap_; }

 private:
  Index lower_;
  Index upper_;
  double gap_;
};

class IntermediateDegeneracy : public NumericError {
 public:
  IntermediateDegeneracy(std::size_t step, const DegenerateSpectrum& cause)
      : NumericError("degenerate spectrum after cradle step " + std::to_string(step) + ": " +
                     cause.what()),
        step_(step),
        lower_(cause.lower()),
        upper_(cause.upper()) {}

  std::size_t step() const { return step_; }
  Index lower() const { return lower_; }
  Index upper() const { return upper_; }

 private:
  std::size_t step_;
  Index lower_;
  Index upper_;
};

class CayleySingular : public NumericError {
 public:
  using NumericError::NumericError;
};

class AmbiguousGap : public NumericError {
 public:
  using NumericError::NumericError;
};

// ---------------------------------------------------------------------------
// Real line extended by signed infinities. Infinite values never enter
// arithmetic; callers branch on is_finite().

class ExtendedReal {
 public:
  enum class Kind { finite, positive_infinity, negative_infinity };

  constexpr ExtendedReal() = default;
  constexpr explicit ExtendedReal(double value) : value_(value) {}

  static constexpr ExtendedReal positive_infinity() {
    ExtendedReal x;
    x.kind_ = Kind::positive_infinity;
    return x;
  }
  static constexpr ExtendedReal negative_infinity() {
    ExtendedReal x;
    x.kind_ = Kind::negative_infinity;
    return x;
  }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_finite() const { return kind_ == Kind::finite; }
  constexpr bool is_infinite() const { return kind_ != Kind::finite; }

  double value() const {
    if (!is_finite()) throw std::logic_error("ExtendedReal::value on an infinite sentinel");
    return value_;
  }

  // Finite value, or the given stand-ins for the two infinities.
  constexpr double value_or(double neg, double pos) const {
    switch (kind_) {
      case Kind::positive_infinity: return pos;
      case Kind::negative_infinity: return neg;
      default: return value_;
    }
  }

  friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::finite || a.value_ == b.value_);
  }

 private:
  Kind kind_ = Kind::finite;
  double value_ = 0.0;
};

}  // namespace cradle
