#include "srrlasso/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "srrlasso/errors.hpp"

namespace srrlasso {

namespace {

#ifdef SRR_LASSO_THEOREM_CHECKS
void theorem_check(bool ok, const char* what) {
    if (!ok) throw numeric_error(std::string("theorem check failed: ") + what);
}
#else
void theorem_check(bool, const char*) {}
#endif

void cd_sweep_inplace(const Problem& problem, Vector& coeffs, Vector& r) {
    const DesignMatrix& X = problem.X;
    for (std::size_t i = 0; i < X.cols(); ++i) {
        std::span<const double> xi = X.col(i);
        double nsq = X.col_norm_sq(i);
        double old = coeffs[i];
        double next = shrinkage(old + dot(xi, r) / nsq, problem.lambda / nsq);
        if (!std::isfinite(next))
            throw numeric_error("cd_sweep: non-finite value at coordinate " +
                                std::to_string(i));
        if (next != old) {
            axpy(old - next, xi, r);
            coeffs[i] = next;
        }
    }
}

double sparsity_of(const Vector& beta) {
    std::size_t zeros = 0;
    for (double v : beta)
        if (v == 0.0) ++zeros;
    return static_cast<double>(zeros) / static_cast<double>(beta.size());
}

constexpr std::size_t kResidualRefreshPeriod = 50;

SolveResult run(const Problem& problem, const SolverConfig& config) {
    if (config.max_sweeps == 0)
        throw std::invalid_argument("solve: max_sweeps must be positive");
    if (config.step_tol && !(*config.step_tol > 0.0))
        throw std::invalid_argument("solve: step_tol must be positive");

    const std::size_t p = problem.p();
    const bool srr = config.variant != Variant::cd;

    SrrState state;
    state.beta.assign(p, 0.0);
    state.s.assign(p, 0.0);
    state.r = problem.y;
    state.r_s = problem.y;

    // SRRT history: the previous sweep's iterate and residual. Sweep 1 uses
    // the zero start, whose residual is y.
    Vector prev_beta(p, 0.0);
    Vector prev_r = problem.y;

    SolveResult result;
    std::optional<double> alpha_for_row;

    for (std::size_t k = 1; k <= config.max_sweeps; ++k) {
        double f_search = objective_from_residual(problem, state.s, state.r_s);
        if (config.variant == Variant::srrt) {
            prev_beta = state.beta;
            prev_r = state.r;
        }

        Vector beta_next = state.s;
        Vector r_next = state.r_s;
        cd_sweep_inplace(problem, beta_next, r_next);

        double step_sq = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            double d = beta_next[i] - state.beta[i];
            step_sq += d * d;
        }
        double step_norm = std::sqrt(step_sq);
        double f_next = objective_from_residual(problem, beta_next, r_next);
        theorem_check(f_next <= f_search + 1e-12,
                      "objective increased across a sweep");

        state.beta = std::move(beta_next);
        state.r = std::move(r_next);
        state.sweep = k;
        if (config.record_trace)
            result.trace.rows.push_back(
                {k, f_next, alpha_for_row, step_norm, sparsity_of(state.beta)});
        if (config.keep_iterates) result.iterates.push_back(state.beta);

        if (config.target_objective && f_next <= *config.target_objective) {
            result.reason = StopReason::objective_target;
            result.converged = true;
            break;
        }
        if (config.step_tol && step_norm <= *config.step_tol) {
            result.reason = StopReason::step_tolerance;
            result.converged = true;
            break;
        }
        if (k == config.max_sweeps) {
            result.reason = StopReason::sweep_limit;
            result.converged = false;
            break;
        }

        if (srr) {
            const Vector& h = config.variant == Variant::srrc ? state.s : prev_beta;
            const Vector& r_h = config.variant == Variant::srrc ? state.r_s : prev_r;
            double f_h = objective_from_residual(problem, h, r_h);

            double diff_sq = 0.0;
            for (std::size_t j = 0; j < r_h.size(); ++j) {
                double d = r_h[j] - state.r[j];
                diff_sq += d * d;
            }
            bool objectives_equal =
                f_h - f_next <= 1e-14 * std::max(std::abs(f_h), std::abs(f_next));
            bool residuals_equal = std::sqrt(diff_sq) <= 1e-14 * norm2(r_h);

            double alpha = 1.0;
            if (!config.force_unit_refinement && !objectives_equal &&
                !residuals_equal) {
                alpha = minimize_g({h, state.beta, r_h, state.r, problem.lambda},
                                   config.refine);
                theorem_check(!(f_h > f_next) || alpha > 0.0,
                              "refinement factor not positive");
            }
            state.alpha_last = alpha;
            result.alphas.push_back(alpha);
            alpha_for_row = alpha;

            Vector s_next(p);
            for (std::size_t i = 0; i < p; ++i)
                s_next[i] = (1.0 - alpha) * h[i] + alpha * state.beta[i];
            Vector r_s_next(r_h.size());
            for (std::size_t j = 0; j < r_h.size(); ++j)
                r_s_next[j] = (1.0 - alpha) * r_h[j] + alpha * state.r[j];
            if (config.variant == Variant::srrt) {
                state.h = prev_beta;
                state.r_h = prev_r;
            } else {
                state.h = state.s;
                state.r_h = state.r_s;
            }
            state.s = std::move(s_next);
            state.r_s = std::move(r_s_next);
            theorem_check(objective_from_residual(problem, state.s, state.r_s) <=
                              f_next + 1e-12,
                          "search point objective above the iterate's");
        } else {
            state.s = state.beta;
            state.r_s = state.r;
        }

        if (k % kResidualRefreshPeriod == 0) {
            state.r = residual(problem, state.beta);
            state.r_s = residual(problem, state.s);
        }
    }

    result.beta = state.beta;
    result.sweeps = state.sweep;
    result.final_objective = objective_from_residual(problem, state.beta, state.r);
    return result;
}

} // namespace

std::pair<Vector, Vector> cd_sweep(const Problem& problem, const Vector& beta_in,
                                   const Vector& r_in) {
    if (beta_in.size() != problem.p() || r_in.size() != problem.n())
        throw std::invalid_argument("cd_sweep: dimension mismatch");
    Vector beta = beta_in;
    Vector r = r_in;
    cd_sweep_inplace(problem, beta, r);
    return {std::move(beta), std::move(r)};
}

std::vector<std::optional<double>> ray_alpha_estimate(const Vector& beta_prev,
                                                      const Vector& beta_cur,
                                                      const Vector& beta_next) {
    if (beta_prev.size() != beta_cur.size() || beta_cur.size() != beta_next.size())
        throw std::invalid_argument("ray_alpha_estimate: length mismatch");
    double scale = std::max(norm_inf(beta_prev), norm_inf(beta_cur));
    std::vector<std::optional<double>> alphas(beta_prev.size());
    for (std::size_t i = 0; i < beta_prev.size(); ++i) {
        double denom = beta_cur[i] - beta_prev[i];
        if (std::abs(denom) <= 1e-14 * scale) continue;
        alphas[i] = (beta_next[i] - beta_prev[i]) / denom;
    }
    return alphas;
}

Vector search_point(const Vector& h, const Vector& beta, double alpha) {
    if (h.size() != beta.size())
        throw std::invalid_argument("search_point: length mismatch");
    Vector s(h.size());
    for (std::size_t i = 0; i < h.size(); ++i)
        s[i] = (1.0 - alpha) * h[i] + alpha * beta[i];
    return s;
}

SolveResult solve(const Problem& problem, const SolverConfig& config) {
    return run(problem, config);
}

SolveResult solve_cd(const Problem& problem, const SolverConfig& config) {
    if (config.variant != Variant::cd)
        throw std::invalid_argument("solve_cd: config.variant must be cd");
    return run(problem, config);
}

SolveResult solve_srrc(const Problem& problem, const SolverConfig& config) {
    if (config.variant != Variant::srrc)
        throw std::invalid_argument("solve_srrc: config.variant must be srrc");
    return run(problem, config);
}

SolveResult solve_srrt(const Problem& problem, const SolverConfig& config) {
    if (config.variant != Variant::srrt)
        throw std::invalid_argument("solve_srrt: config.variant must be srrt");
    return run(problem, config);
}

} // namespace srrlasso
