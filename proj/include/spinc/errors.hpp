#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace spinc {

// Precondition violated by the caller (bad index, malformed config).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operands built over different truncated spaces.
class ConfigMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Input data that is well-formed but geometrically inadmissible.
// The CLI maps this family to exit code 2.
class AdmissibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegralityViolation : public AdmissibilityError {
 public:
  IntegralityViolation(const std::string& what, std::int64_t numerator, std::int64_t modulus)
      : AdmissibilityError(what), numerator_(numerator), modulus_(modulus) {}

  std::int64_t numerator() const { return numerator_; }
  std::int64_t modulus() const { return modulus_; }
  // Non-negative remainder of numerator modulo modulus.
  std::int64_t residue() const { return ((numerator_ % modulus_) + modulus_) % modulus_; }

 private:
  std::int64_t numerator_;
  std::int64_t modulus_;
};

// |<z0', z0>| fell below the pairing floor.
class PairingFloorViolation : public AdmissibilityError {
 public:
  PairingFloorViolation(const std::string& what, double pairing)
      : AdmissibilityError(what), pairing_(pairing) {}
  double pairing() const { return pairing_; }

 private:
  double pairing_;
};

// A numerical answer could not be certified (ambiguous rank, non-integral trace).
class NumericalDiagnostic : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PoleOnContour : public NumericalDiagnostic {
 public:
  using NumericalDiagnostic::NumericalDiagnostic;
};

// ||A(tau0)^{-1}(A(tau0) - A(tau))|| >= 1/2.
class SmallnessViolation : public std::runtime_error {
 public:
  SmallnessViolation(const std::string& what, double smallness, double suggested_step)
      : std::runtime_error(what), smallness_(smallness), suggested_step_(suggested_step) {}
  double smallness() const { return smallness_; }
  double suggested_step() const { return suggested_step_; }

 private:
  double smallness_;
  double suggested_step_;
};

}  // namespace spinc
