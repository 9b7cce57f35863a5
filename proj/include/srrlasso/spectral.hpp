#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "srrlasso/linalg.hpp"

namespace srrlasso {

// Dense square matrix, row-major. Only used at diagnostic scale.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    static SquareMatrix identity(std::size_t n);

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

// L + D + U partition of the Gram matrix X^T X: strictly lower, diagonal,
// strictly upper. The diagonal entries are the squared column norms.
struct LduSplit {
    SquareMatrix lower;
    Vector diag;
    SquareMatrix upper;

    std::size_t size() const noexcept { return diag.size(); }
};

struct EigenReport {
    std::vector<std::complex<double>> eigenvalues;
    double max_magnitude = 0.0;
    // t_products[k-1][i] = |t_i^k|; empty when no refinement factors were
    // supplied.
    std::vector<std::vector<double>> t_products;
};

inline constexpr std::size_t kDefaultSpectralCeiling = 512;

LduSplit ldu_split(const DesignMatrix& X,
                   std::size_t ceiling = kDefaultSpectralCeiling);

// G = -(L+D)^{-1} U, formed by forward substitution column by column.
SquareMatrix gauss_seidel_matrix(const LduSplit& split);

// All eigenvalues of a real (generally nonsymmetric) matrix via balancing,
// Householder reduction to Hessenberg form, and Francis double-shift QR.
// Sorted by (real, imag) for reproducible output.
std::vector<std::complex<double>> eigenvalues(const SquareMatrix& M,
                                              bool balance = true);

// Per-sweep contraction products along each eigendirection:
//   t_i^1 = delta_i,
//   t_i^k = t_i^{k-1} * alpha^k * (delta_i + (1 - alpha^{k-1}) / alpha^{k-1}).
// Returns |t_i^k| for k = 1..alphas.size(). Plain coordinate descent
// corresponds to an all-ones alpha sequence.
std::vector<std::vector<double>> srrc_factor_products(
    const std::vector<std::complex<double>>& eigs, const std::vector<double>& alphas);

// Maximum defect of the SRRT difference recursion over the run:
//   k = 2:    b^2 - b^1 = alpha^1 G (b^1 - b^0)
//   k >= 3:   b^k - b^{k-1} =
//             G [(1-alpha^{k-2})(b^{k-2} - b^{k-3}) + alpha^{k-1}(b^{k-1} - b^{k-2})].
// `betas` holds b^0, b^1, ... and `alphas` the factors in computation order.
// Only defined for lambda = 0.
double srrt_recursion_check(const Problem& problem,
                            const std::vector<Vector>& betas,
                            const std::vector<double>& alphas,
                            const LduSplit& split);

} // namespace srrlasso
