#include "srrlasso/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "srrlasso/errors.hpp"

namespace srrlasso {

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2_sq(std::span<const double> a) { return dot(a, a); }

double norm2(std::span<const double> a) { return std::sqrt(norm2_sq(a)); }

double norm1(std::span<const double> a) {
    double acc = 0.0;
    for (double v : a) acc += std::abs(v);
    return acc;
}

double norm_inf(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

void axpy(double c, std::span<const double> x, std::span<double> a) {
    for (std::size_t i = 0; i < x.size(); ++i) a[i] += c * x[i];
}

DesignMatrix::DesignMatrix(std::size_t n, std::size_t p, Vector values)
    : n_(n), p_(p), values_(std::move(values)) {
    if (n_ == 0 || p_ == 0)
        throw std::invalid_argument("DesignMatrix: dimensions must be positive");
    if (values_.size() != n_ * p_)
        throw std::invalid_argument("DesignMatrix: expected " +
                                    std::to_string(n_ * p_) + " values, got " +
                                    std::to_string(values_.size()));
    col_norm_sq_.resize(p_);
    for (std::size_t i = 0; i < p_; ++i) {
        double nsq = norm2_sq(col(i));
        if (!std::isfinite(nsq))
            throw std::invalid_argument("DesignMatrix: column " + std::to_string(i) +
                                        " contains non-finite values");
        if (nsq <= 0.0)
            throw std::invalid_argument("DesignMatrix: column " + std::to_string(i) +
                                        " is identically zero");
        col_norm_sq_[i] = nsq;
    }
}

Vector DesignMatrix::multiply(std::span<const double> beta) const {
    if (beta.size() != p_)
        throw std::invalid_argument("DesignMatrix::multiply: dimension mismatch");
    Vector out(n_, 0.0);
    for (std::size_t i = 0; i < p_; ++i)
        if (beta[i] != 0.0) axpy(beta[i], col(i), out);
    return out;
}

Vector DesignMatrix::multiply_transposed(std::span<const double> v) const {
    if (v.size() != n_)
        throw std::invalid_argument("DesignMatrix::multiply_transposed: dimension mismatch");
    Vector out(p_);
    for (std::size_t i = 0; i < p_; ++i) out[i] = dot(col(i), v);
    return out;
}

Problem::Problem(DesignMatrix X_in, Vector y_in, double lambda_in)
    : X(std::move(X_in)), y(std::move(y_in)), lambda(lambda_in) {
    if (y.size() != X.rows())
        throw std::invalid_argument("Problem: length(y) must equal the sample count");
    if (!(lambda >= 0.0))
        throw std::invalid_argument("Problem: lambda must be nonnegative");
}

SolverState SolverState::zero_start(const Problem& problem) {
    SolverState st;
    st.beta.assign(problem.p(), 0.0);
    st.s.assign(problem.p(), 0.0);
    st.r = problem.y;
    st.r_s = problem.y;
    st.sweep = 0;
    return st;
}

double objective(const Problem& problem, std::span<const double> beta) {
    if (beta.size() != problem.p())
        throw std::invalid_argument("objective: dimension mismatch");
    Vector pred = problem.X.multiply(beta);
    double quad = 0.0;
    for (std::size_t j = 0; j < pred.size(); ++j) {
        double d = pred[j] - problem.y[j];
        quad += d * d;
    }
    return 0.5 * quad + problem.lambda * norm1(beta);
}

double objective_from_residual(const Problem& problem,
                               std::span<const double> beta,
                               std::span<const double> residual) {
    return 0.5 * norm2_sq(residual) + problem.lambda * norm1(beta);
}

double shrinkage(double x, double threshold) {
    if (x > threshold) return x - threshold;
    if (x < -threshold) return x + threshold;
    return 0.0;
}

Vector residual(const Problem& problem, std::span<const double> beta) {
    if (beta.size() != problem.p())
        throw std::invalid_argument("residual: dimension mismatch");
    Vector r = problem.y;
    for (std::size_t i = 0; i < problem.p(); ++i)
        if (beta[i] != 0.0) axpy(-beta[i], problem.X.col(i), r);
    return r;
}

double drift_tolerance(const Problem& problem) {
    return 1e-8 * (1.0 + norm2(problem.y));
}

namespace {

bool refresh_if_drifted(const Problem& problem, std::span<const double> coeffs,
                        Vector& cached, double tol) {
    Vector fresh = residual(problem, coeffs);
    double dev = 0.0;
    for (std::size_t j = 0; j < fresh.size(); ++j)
        dev = std::max(dev, std::abs(fresh[j] - cached[j]));
    if (dev > tol) {  // strict: deviation exactly at the tolerance is kept
        cached = std::move(fresh);
        return true;
    }
    return false;
}

} // namespace

bool drift_check_and_refresh(const Problem& problem, SolverState& state) {
    double tol = drift_tolerance(problem);
    bool refreshed = refresh_if_drifted(problem, state.beta, state.r, tol);
    refreshed |= refresh_if_drifted(problem, state.s, state.r_s, tol);
    return refreshed;
}

} // namespace srrlasso
