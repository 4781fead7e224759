#pragma once

namespace preth {

/// Accumulated kappa-norm of everything a computation discarded, split by
/// source. Entries only ever grow; the total is the certified slack that
/// accompanies any truncated result.
struct TruncationLedger {
  double series_tail = 0.0;   // Lie-series remainder bounds
  double support_cap = 0.0;   // terms dropped by the support-width cap
  double harmonic_cap = 0.0;  // Fourier content beyond the harmonic cap
  double prune = 0.0;         // entry/term pruning and pair cutoffs

  double total() const {
    return series_tail + support_cap + harmonic_cap + prune;
  }

  TruncationLedger& operator+=(const TruncationLedger& other) {
    series_tail += other.series_tail;
    support_cap += other.support_cap;
    harmonic_cap += other.harmonic_cap;
    prune += other.prune;
    return *this;
  }
};

}  // namespace preth
