#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "srrlasso/linalg.hpp"
#include "srrlasso/refine.hpp"

namespace srrlasso {

enum class Variant { cd, srrc, srrt };

enum class StopReason { step_tolerance, objective_target, sweep_limit };

struct SolverConfig {
    Variant variant = Variant::cd;
    std::optional<double> step_tol;          // stop when ||b^k - b^{k-1}||_2 <= tol
    std::optional<double> target_objective;  // stop when f(b^k) <= target
    std::size_t max_sweeps = 100000;
    RefineMethod refine = RefineMethod::closed_form_auto;
    bool record_trace = true;
    bool keep_iterates = false;  // additionally store every sweep's beta
    // Diagnostic: skip the line search and use alpha = 1 everywhere, which
    // reduces both SRR variants to plain coordinate descent.
    bool force_unit_refinement = false;
};

// One row per sweep. `alpha` is the refinement factor whose search point this
// sweep started from; empty on the first row and for plain coordinate
// descent. A skipped refinement is recorded as alpha = 1.
struct TraceRow {
    std::size_t sweep;
    double objective;
    std::optional<double> alpha;
    double step_norm;
    double sparsity;  // zero entries / p
};

struct IterationTrace {
    std::vector<TraceRow> rows;
};

struct SolveResult {
    Vector beta;
    IterationTrace trace;
    StopReason reason = StopReason::sweep_limit;
    std::size_t sweeps = 0;
    double final_objective = 0.0;
    bool converged = false;

    // Populated when config.keep_iterates: beta after sweep 1, 2, ...
    std::vector<Vector> iterates;
    // Refinement factors in the order they were computed: alphas[k-1] was
    // computed at the end of sweep k (empty for plain coordinate descent).
    std::vector<double> alphas;
};

// Extends the solver state with the history point of the ray refinement.
struct SrrState : SolverState {
    Vector h;
    Vector r_h;
    double alpha_last = 1.0;
};

// One full cyclic pass: for i = 1..p applies the shrinkage update and the
// incremental residual update. `beta_in` is the point the sweep starts from
// (the search point for the SRR variants) and `r_in` its residual.
std::pair<Vector, Vector> cd_sweep(const Problem& problem, const Vector& beta_in,
                                   const Vector& r_in);

// Per-coordinate ray factor: solves beta_next = (1-a)*beta_prev + a*beta_cur
// for a. Coordinates with |beta_cur - beta_prev| below 1e-14 * scale are
// returned empty.
std::vector<std::optional<double>> ray_alpha_estimate(const Vector& beta_prev,
                                                      const Vector& beta_cur,
                                                      const Vector& beta_next);

// (1-alpha)*h + alpha*beta
Vector search_point(const Vector& h, const Vector& beta, double alpha);

SolveResult solve(const Problem& problem, const SolverConfig& config);
SolveResult solve_cd(const Problem& problem, const SolverConfig& config);
SolveResult solve_srrc(const Problem& problem, const SolverConfig& config);
SolveResult solve_srrt(const Problem& problem, const SolverConfig& config);

} // namespace srrlasso
