#include "srrlasso/refine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srrlasso/errors.hpp"
#include "srrlasso/linalg.hpp"

namespace srrlasso {

RefineStats& refine_stats() {
    thread_local RefineStats stats;
    return stats;
}

namespace {

void check_dimensions(const RefinementInput& input) {
    if (input.h.size() != input.beta.size())
        throw std::invalid_argument("refine: h and beta lengths differ");
    if (input.r_h.size() != input.r.size())
        throw std::invalid_argument("refine: r_h and r lengths differ");
    if (!(input.lambda >= 0.0))
        throw std::invalid_argument("refine: lambda must be nonnegative");
}

void check_not_degenerate(const RefinementInput& input) {
    double diff_sq = 0.0;
    for (std::size_t j = 0; j < input.r_h.size(); ++j) {
        double d = input.r_h[j] - input.r[j];
        diff_sq += d * d;
    }
    double rh_norm = norm2(input.r_h);
    if (std::sqrt(diff_sq) <= 1e-14 * rh_norm)
        throw degenerate_input_error(
            "refine: r_h and r coincide; the caller should have declared convergence");
}

struct RawBreakpoint {
    std::size_t index;
    double w;
    double jump;
};

// Affine-plus-jumps decomposition of the subgradient for alpha > 0:
//   dg(alpha) = slope*alpha + base + sum of jumps of breakpoints below alpha,
// with the full jump interval at a breakpoint itself. `base` carries the
// alpha-independent penalty contributions and every breakpoint coordinate at
// its value below its own w.
struct SubgradientParts {
    double slope;
    double base;
    std::vector<RawBreakpoint> omega;
};

SubgradientParts decompose(const RefinementInput& input) {
    SubgradientParts parts;
    double slope = 0.0;
    double rh_dot_d = 0.0;
    for (std::size_t j = 0; j < input.r_h.size(); ++j) {
        double d = input.r_h[j] - input.r[j];
        slope += d * d;
        rh_dot_d += input.r_h[j] * d;
    }
    parts.slope = slope;

    double fixed_sum = 0.0;  // coordinates whose sign set is constant over alpha > 0
    double omega_sum = 0.0;
    for (std::size_t i = 0; i < input.h.size(); ++i) {
        double hi = input.h[i];
        double diff = input.beta[i] - hi;
        if (diff == 0.0) continue;
        double mag = std::abs(diff);
        if (hi == 0.0 || hi * diff > 0.0) {
            fixed_sum += mag;
        } else {
            omega_sum += mag;
            parts.omega.push_back({i, hi / (hi - input.beta[i]), 2.0 * input.lambda * mag});
        }
    }
    parts.base = -rh_dot_d + input.lambda * (fixed_sum - omega_sum);
    return parts;
}

SubgradientInterval evaluate(const SubgradientParts& parts, double alpha) {
    double below = 0.0;
    double at = 0.0;
    for (const RawBreakpoint& bp : parts.omega) {
        if (bp.w < alpha)
            below += bp.jump;
        else if (bp.w == alpha)
            at += bp.jump;
    }
    double lo = parts.slope * alpha + parts.base + below;
    return {lo, lo + at};
}

} // namespace

double refine_scale(const RefinementInput& input) {
    check_dimensions(input);
    double diff_sq = 0.0;
    for (std::size_t j = 0; j < input.r_h.size(); ++j) {
        double d = input.r_h[j] - input.r[j];
        diff_sq += d * d;
    }
    double coef_sum = 0.0;
    for (std::size_t i = 0; i < input.h.size(); ++i)
        coef_sum += std::abs(input.beta[i] - input.h[i]);
    return diff_sq + input.lambda * coef_sum + 1.0;
}

SubgradientInterval subgradient_interval(const RefinementInput& input, double alpha) {
    check_dimensions(input);
    if (!(alpha > 0.0))
        throw std::invalid_argument("subgradient_interval: alpha must be positive");
    return evaluate(decompose(input), alpha);
}

std::vector<Breakpoint> breakpoints(const RefinementInput& input) {
    check_dimensions(input);
    SubgradientParts parts = decompose(input);
    std::sort(parts.omega.begin(), parts.omega.end(),
              [](const RawBreakpoint& a, const RawBreakpoint& b) { return a.w < b.w; });
    std::vector<Breakpoint> merged;
    for (const RawBreakpoint& bp : parts.omega) {
        if (!merged.empty() && merged.back().w == bp.w)
            merged.back().jump += bp.jump;
        else
            merged.push_back({bp.index, bp.w, bp.jump});
    }
    return merged;
}

double alpha_closed_form(const RefinementInput& input) {
    check_dimensions(input);
    if (input.lambda != 0.0)
        throw std::invalid_argument("alpha_closed_form: lambda must be zero");
    check_not_degenerate(input);
    double slope = 0.0;
    double rh_dot_d = 0.0;
    for (std::size_t j = 0; j < input.r_h.size(); ++j) {
        double d = input.r_h[j] - input.r[j];
        slope += d * d;
        rh_dot_d += input.r_h[j] * d;
    }
    return rh_dot_d / slope;
}

double alpha_by_sort(const RefinementInput& input) {
    check_dimensions(input);
    if (!(input.lambda > 0.0))
        throw std::invalid_argument("alpha_by_sort: lambda must be positive");
    check_not_degenerate(input);

    SubgradientParts parts = decompose(input);
    std::sort(parts.omega.begin(), parts.omega.end(),
              [](const RawBreakpoint& a, const RawBreakpoint& b) { return a.w < b.w; });

    double offset = 0.0;
    for (const RawBreakpoint& bp : parts.omega) {
        double lo = parts.slope * bp.w + parts.base + offset;
        double hi = lo + bp.jump;
        if (lo <= 0.0 && hi >= 0.0) return bp.w;
        if (lo > 0.0) break;  // root is in the open piece ending at this w
        offset += bp.jump;
    }
    return -(parts.base + offset) / parts.slope;
}

double alpha_by_bisection(const RefinementInput& input) {
    check_dimensions(input);
    if (!(input.lambda > 0.0))
        throw std::invalid_argument("alpha_by_bisection: lambda must be positive");
    check_not_degenerate(input);

    RefineStats& stats = refine_stats();
    SubgradientParts parts = decompose(input);
    std::vector<RawBreakpoint> active = std::move(parts.omega);
    double offset = 0.0;  // jumps of breakpoints folded below the bracket

    auto eval = [&](double alpha) -> SubgradientInterval {
        ++stats.subgradient_evals;
        stats.breakpoint_touches += active.size();
        double below = 0.0;
        double at = 0.0;
        for (const RawBreakpoint& bp : active) {
            if (bp.w < alpha)
                below += bp.jump;
            else if (bp.w == alpha)
                at += bp.jump;
        }
        double lo = parts.slope * alpha + parts.base + offset + below;
        return {lo, lo + at};
    };

    // Initial bracket: lower end 0 (never returned), upper end by doubling
    // until the subgradient is entirely positive. Terminates because the
    // slope term dominates.
    double lower = 0.0;
    double upper = 1.0;
    for (int tries = 0;; ++tries) {
        SubgradientInterval g = eval(upper);
        if (g.lo > 0.0) break;
        if (g.hi >= 0.0) return upper;  // landed on the root breakpoint
        lower = upper;
        upper *= 2.0;
        if (tries > 1100)
            throw numeric_error("alpha_by_bisection: bracket doubling failed");
    }

    std::size_t max_iter = 128 + 4 * active.size();
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        // Keep only breakpoints strictly inside the bracket; those at or
        // below `lower` always contribute their jump, those at or above
        // `upper` never do.
        std::size_t kept = 0;
        for (const RawBreakpoint& bp : active) {
            if (bp.w <= lower)
                offset += bp.jump;
            else if (bp.w < upper)
                active[kept++] = bp;
        }
        active.resize(kept);

        if (active.empty())
            return -(parts.base + offset) / parts.slope;

        double mid = 0.5 * (lower + upper);
        SubgradientInterval g = eval(mid);
        if (g.lo <= 0.0 && g.hi >= 0.0) return mid;

        if (g.lo > 0.0) {
            upper = mid;
            double snap = -1.0;
            for (const RawBreakpoint& bp : active)
                if (bp.w < mid) snap = std::max(snap, bp.w);
            if (snap <= lower) continue;
            SubgradientInterval gs = eval(snap);
            if (gs.lo <= 0.0 && gs.hi >= 0.0) return snap;
            if (gs.lo > 0.0)
                upper = snap;
            else
                lower = snap;
        } else {
            lower = mid;
            double snap = upper;
            for (const RawBreakpoint& bp : active)
                if (bp.w > mid) snap = std::min(snap, bp.w);
            if (snap >= upper) continue;
            SubgradientInterval gs = eval(snap);
            if (gs.lo <= 0.0 && gs.hi >= 0.0) return snap;
            if (gs.hi < 0.0)
                lower = snap;
            else
                upper = snap;
        }
    }
    throw numeric_error("alpha_by_bisection: failed to isolate the root piece");
}

double minimize_g(const RefinementInput& input, RefineMethod method) {
    check_dimensions(input);
    if (input.lambda == 0.0) return alpha_closed_form(input);
    switch (method) {
        case RefineMethod::bisection:
            return alpha_by_bisection(input);
        case RefineMethod::sort:
        case RefineMethod::closed_form_auto:
            return alpha_by_sort(input);
    }
    throw std::invalid_argument("minimize_g: unknown method");
}

} // namespace srrlasso
