#pragma once

#include <stdexcept>
#include <string>

namespace cubic {

enum class Err {
  PoleAtOne,
  OutOfDomain,
  GuardViolation,
  PoleAtNonpositiveInteger,
  PoleProximity,
  Overflow,
  CacheCorruption,
  SliceTooSmall,
  EmptyFamily,
  HNotCubefree,
  BadS,
  BadSigma,
  QuadratureNonconvergence,
  SieveTooSmall,
  DomainViolation,
  SlowConvergence,
  Validation,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

// Errors caused by numerics failing to settle rather than by bad input.
inline bool is_nonconvergence(Err e) {
  return e == Err::QuadratureNonconvergence || e == Err::SlowConvergence;
}

}  // namespace cubic
