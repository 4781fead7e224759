#pragma once

#include <stdexcept>
#include <string>

namespace preth {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two potentials built over different lattices were combined.
struct LatticeMismatch : Error {
  using Error::Error;
};

/// A Lie series failed to contract within the allowed number of terms;
/// the perturbative regime is violated for this input.
struct SeriesDivergence : Error {
  using Error::Error;
};

/// A dense object would exceed the configured dimension budget.
struct BudgetExceeded : Error {
  using Error::Error;
};

/// A time-dependent propagator failed its step-halving convergence check.
struct IntegratorFailure : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

/// Certified-mode preconditions failed; the message lists the violated
/// inequality.
struct CertificationRefused : Error {
  using Error::Error;
};

}  // namespace preth
