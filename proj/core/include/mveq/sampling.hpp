#pragma once

#include <cstdint>
#include <vector>

#include "mveq/interval.hpp"

namespace mveq {

enum class SampleMode {
    Uniform,           ///< arithmetic progression over the margined window
    UniformPlusRandom, ///< uniform points plus seeded uniform-random points
};

/// Deterministic sampling plan over a finite window.  Points always stay
/// strictly inside the window, shrunk by margin*(width) on each side, so no
/// evaluation ever touches an endpoint singularity.
struct SamplePlan {
    Interval window;
    int count = 101;
    SampleMode mode = SampleMode::Uniform;
    std::uint64_t seed = 42;
    double margin = 1e-3;

    SamplePlan() = default;
    SamplePlan(Interval w, int n, SampleMode m = SampleMode::Uniform,
               std::uint64_t s = 42, double marginFraction = 1e-3);
};

/// Strictly increasing points inside the margined window.  Uniform mode
/// returns `count` equally spaced points; uniform-plus-random appends `count`
/// seeded random points before sorting (duplicates removed).
std::vector<double> sample(const SamplePlan& plan);

} // namespace mveq
