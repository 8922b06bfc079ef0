#pragma once
// thresholds.hpp - Tunable algorithm thresholds, aggregated so the tuner and
// the CLI can load/store them as one unit. Defaults here are starting points;
// per-platform values come from the tune command.

#include <cstddef>

namespace bigslice {

struct MulThresholds {
    std::size_t karatsuba_cutoff = 24;  // limbs; below: classical multiply
    std::size_t parallel_cutoff = 200;  // limbs; above: 3-way concurrent top split
};

struct MuldersConfig {
    double beta = 0.7;                  // split fraction for slice recursion
    std::size_t mulders_cutoff = 20;    // limbs; below: classical column slices
};

struct DivThresholds {
    std::size_t fast_cutoff = 50;       // quotient/divisor limbs; below: classical
    double block_ratio = 2.0;           // len(q)/len(v) above which: super-digit regime
};

struct Tuning {
    MulThresholds mul;
    MuldersConfig mulders;
    DivThresholds div;
};

// Process-wide thresholds used by the convenience entry points. Set before
// heavy multi-threaded use; reads are unsynchronized.
inline Tuning& global_tuning() {
    static Tuning t;
    return t;
}

} // namespace bigslice
