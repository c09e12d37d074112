#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace bgt {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An exact enumeration would exceed its configured size cap.
class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(const std::string& what_op, double required, double cap)
      : std::runtime_error(what_op + ": enumeration needs " + format_count(required) +
                           " items, cap is " + format_count(cap)),
        required_(required),
        cap_(cap) {}

  double required() const noexcept { return required_; }
  double cap() const noexcept { return cap_; }

 private:
  static std::string format_count(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }
  double required_;
  double cap_;
};

// A numerical routine failed to produce an answer (no bracket, no convergence).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The energy H is undefined because there are no positive tests.
class UndefinedEnergy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A chain cannot move: every candidate is already in the state (p == k).
class FrozenChain : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bgt
