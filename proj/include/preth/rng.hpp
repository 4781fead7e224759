#pragma once

#include <cstdint>
#include <random>

#include "preth/dense.hpp"

namespace preth {

/// Deterministic random source. Built on std::mt19937_64 (a fully specified
/// engine) with all real-valued transforms implemented here, so identical
/// seeds give identical streams on every platform. Named substreams are
/// derived with split() so independent consumers never share state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent generator for substream `stream` of this seed.
  Rng split(std::uint64_t stream) const;

  std::uint64_t next_u64();
  double uniform();            // [0, 1)
  double uniform(double lo, double hi);
  double normal();             // standard normal (Box-Muller)
  Complex complex_normal();    // independent N(0,1) real and imaginary parts

  /// Haar-random unit vector of the given dimension.
  Vector haar_state(long dim);

  /// Tensor product of independent per-site Haar states (ascending site
  /// index in the most-significant tensor slot).
  Vector product_state(int sites, int local_dim);

  /// Computational-basis product state: each site's basis index is drawn
  /// uniformly. Same tensor-slot convention as product_state.
  Vector basis_product_state(int sites, int local_dim);

 private:
  std::uint64_t seed_ = 0;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace preth
