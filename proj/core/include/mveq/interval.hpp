#pragma once

#include <cmath>
#include <limits>

#include "mveq/error.hpp"

namespace mveq {

/// Open interval (lo, hi); either endpoint may be infinite.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    Interval() = default;
    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (std::isnan(lo) || std::isnan(hi) || !(lo < hi))
            throw SpecError("interval endpoints must satisfy lo < hi");
    }

    bool contains(double x) const { return lo < x && x < hi; }
    bool isFinite() const { return std::isfinite(lo) && std::isfinite(hi); }
    double width() const { return hi - lo; }
};

/// Clamp an interval to a finite window of at most `span` total width.
/// A finite interval is returned unchanged.  A half-infinite interval keeps
/// its finite endpoint and extends `span` toward the infinite side; the real
/// line becomes (-span/2, span/2).
inline Interval finite_window(const Interval& iv, double span) {
    if (!(span > 0.0) || !std::isfinite(span))
        throw SpecError("window span must be positive and finite");
    bool loFinite = std::isfinite(iv.lo);
    bool hiFinite = std::isfinite(iv.hi);
    if (loFinite && hiFinite) return iv;
    if (loFinite) return Interval(iv.lo, iv.lo + span);
    if (hiFinite) return Interval(iv.hi - span, iv.hi);
    return Interval(-span / 2.0, span / 2.0);
}

} // namespace mveq
