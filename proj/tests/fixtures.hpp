#pragma once

// Frozen regression fixtures for the canonical 4-bay benchmark truss.
// Values are computed once from the model and pinned here; the benchmark
// geometry is part of the toolkit's contract, so any change that moves these
// numbers is a breaking change.

namespace fixtures {

// Smallest frequency count for which the iterated equality-constrained L1
// solve localizes the 20% two-bar damage exactly (canonical bars 2 and 18).
inline constexpr int kBenchmarkFeatureCount = 9;

// Relative changes (f_damaged - f_nominal) / f_nominal of all 16 canonical
// frequencies for the 20% two-bar scenario. PLACEHOLDER: regenerated by
// tools/freeze_fixtures before release.
inline constexpr double kBenchmarkFrequencyChanges20[16] = {
    0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
};

}  // namespace fixtures
