#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace srrlasso {

enum class RefineMethod {
    closed_form_auto,  // closed form when lambda == 0, sort scan otherwise
    sort,
    bisection,
};

// Inputs defining g(alpha) = f((1-alpha)*h + alpha*beta). The caller owns the
// storage and guarantees r_h = y - X*h and r = y - X*beta.
struct RefinementInput {
    std::span<const double> h;
    std::span<const double> beta;
    std::span<const double> r_h;
    std::span<const double> r;
    double lambda = 0.0;
};

// alpha at which coordinate index of the moving point h - alpha*(h - beta)
// crosses zero; the subgradient of g jumps by `jump` there. Coordinates
// sharing the same w are merged with their jumps summed.
struct Breakpoint {
    std::size_t index;
    double w;
    double jump;  // 2 * lambda * |beta_i - h_i|, summed over merged coordinates
};

struct SubgradientInterval {
    double lo;
    double hi;
};

// Operation counters for the instrumented complexity tests. Thread-local;
// reset before a measured call.
struct RefineStats {
    std::uint64_t subgradient_evals = 0;   // interval evaluations in bisection
    std::uint64_t breakpoint_touches = 0;  // breakpoints scanned across evals
    void reset() { *this = RefineStats{}; }
};
RefineStats& refine_stats();

// min/max of the subgradient set of g at alpha > 0.
SubgradientInterval subgradient_interval(const RefinementInput& input, double alpha);

// Breakpoints of the subgradient, ascending in w, duplicates merged.
std::vector<Breakpoint> breakpoints(const RefinementInput& input);

// lambda == 0: alpha = <r_h, r_h - r> / ||r_h - r||^2.
double alpha_closed_form(const RefinementInput& input);

// lambda > 0: ascending scan over breakpoints, analytic solve of the piece
// containing the root.
double alpha_by_sort(const RefinementInput& input);

// lambda > 0: bracketing bisection with probes snapped to breakpoints; the
// isolated piece is solved analytically.
double alpha_by_bisection(const RefinementInput& input);

// Dispatch: closed form when lambda == 0, otherwise the selected method.
double minimize_g(const RefinementInput& input, RefineMethod method);

// Scale used for the root tolerances of this module:
// ||r_h - r||^2 + lambda * sum_i |beta_i - h_i| + 1.
double refine_scale(const RefinementInput& input);

} // namespace srrlasso
