#include "mveq/sampling.hpp"

#include <algorithm>
#include <random>

namespace mveq {

SamplePlan::SamplePlan(Interval w, int n, SampleMode m, std::uint64_t s, double marginFraction)
    : window(w), count(n), mode(m), seed(s), margin(marginFraction) {
    if (!window.isFinite()) throw SpecError("sample window must be finite");
    if (count < 1) throw SpecError("sample count must be positive");
    if (!(margin > 0.0) || margin > 0.25)
        throw SpecError("sample margin must lie in (0, 1/4]");
}

std::vector<double> sample(const SamplePlan& plan) {
    if (!plan.window.isFinite()) throw SpecError("sample window must be finite");
    if (plan.count < 1) throw SpecError("sample count must be positive");
    if (!(plan.margin > 0.0) || plan.margin > 0.25)
        throw SpecError("sample margin must lie in (0, 1/4]");

    const double pad = plan.margin * plan.window.width();
    const double lo = plan.window.lo + pad;
    const double hi = plan.window.hi - pad;

    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(plan.count) *
                (plan.mode == SampleMode::UniformPlusRandom ? 2 : 1));
    if (plan.count == 1) {
        pts.push_back(0.5 * (lo + hi));
    } else {
        const double step = (hi - lo) / (plan.count - 1);
        for (int i = 0; i < plan.count; ++i) pts.push_back(lo + step * i);
        pts.back() = hi; // guard against rounding past the margined edge
    }

    if (plan.mode == SampleMode::UniformPlusRandom) {
        std::mt19937_64 rng(plan.seed);
        std::uniform_real_distribution<double> dist(lo, hi);
        for (int i = 0; i < plan.count; ++i) pts.push_back(dist(rng));
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    }
    return pts;
}

} // namespace mveq
