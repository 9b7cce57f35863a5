#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace srrlasso {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm2_sq(std::span<const double> a);
double norm1(std::span<const double> a);
double norm_inf(std::span<const double> a);

// a += c * x
void axpy(double c, std::span<const double> x, std::span<double> a);

// Dense column-major design matrix with per-column squared norms cached at
// construction. Zero columns are rejected.
class DesignMatrix {
public:
    DesignMatrix(std::size_t n, std::size_t p, Vector values);

    std::size_t rows() const noexcept { return n_; }
    std::size_t cols() const noexcept { return p_; }

    std::span<const double> col(std::size_t i) const {
        return {values_.data() + i * n_, n_};
    }
    double col_norm_sq(std::size_t i) const { return col_norm_sq_[i]; }
    const Vector& values() const noexcept { return values_; }

    // y = X * beta
    Vector multiply(std::span<const double> beta) const;
    // y = X^T * v
    Vector multiply_transposed(std::span<const double> v) const;

private:
    std::size_t n_;
    std::size_t p_;
    Vector values_;        // column-major, n_ * p_ entries
    Vector col_norm_sq_;
};

struct Problem {
    DesignMatrix X;
    Vector y;
    double lambda;

    Problem(DesignMatrix X, Vector y, double lambda);

    std::size_t n() const noexcept { return X.rows(); }
    std::size_t p() const noexcept { return X.cols(); }
};

// Current iterate, search point, and their cached residuals.
struct SolverState {
    Vector beta;
    Vector s;
    Vector r;    // y - X*beta
    Vector r_s;  // y - X*s
    std::size_t sweep = 0;

    static SolverState zero_start(const Problem& problem);
};

// 0.5 * ||X*beta - y||^2 + lambda * ||beta||_1
double objective(const Problem& problem, std::span<const double> beta);

// Objective evaluated from a cached residual; avoids the matvec.
double objective_from_residual(const Problem& problem,
                               std::span<const double> beta,
                               std::span<const double> residual);

// Soft-thresholding: x moved toward zero by threshold, clamped at zero.
double shrinkage(double x, double threshold);

// y - X*beta, recomputed from scratch.
Vector residual(const Problem& problem, std::span<const double> beta);

// Tolerance used to decide whether a cached residual has drifted:
// 1e-8 * (1 + ||y||_2).
double drift_tolerance(const Problem& problem);

// Recomputes r (and r_s) when the cached copy deviates from y - X*beta by
// strictly more than the drift tolerance in the infinity norm. Returns true
// when either residual was refreshed.
bool drift_check_and_refresh(const Problem& problem, SolverState& state);

} // namespace srrlasso
