#include "srrlasso/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "srrlasso/errors.hpp"

namespace srrlasso {

SquareMatrix SquareMatrix::identity(std::size_t n) {
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

LduSplit ldu_split(const DesignMatrix& X, std::size_t ceiling) {
    const std::size_t p = X.cols();
    if (p > ceiling)
        throw unsupported_scale_error("ldu_split: p = " + std::to_string(p) +
                                      " exceeds the dense ceiling " +
                                      std::to_string(ceiling));
    LduSplit split;
    split.lower = SquareMatrix(p);
    split.upper = SquareMatrix(p);
    split.diag.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
        split.diag[i] = X.col_norm_sq(i);
        for (std::size_t j = i + 1; j < p; ++j) {
            double g = dot(X.col(i), X.col(j));
            split.upper(i, j) = g;
            split.lower(j, i) = g;
        }
    }
    return split;
}

SquareMatrix gauss_seidel_matrix(const LduSplit& split) {
    const std::size_t p = split.size();
    SquareMatrix G(p);
    // Solve (L+D) g_j = -u_j by forward substitution, one column at a time.
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < p; ++i) {
            double acc = -split.upper(i, j);
            for (std::size_t k = 0; k < i; ++k)
                acc -= split.lower(i, k) * G(k, j);
            G(i, j) = acc / split.diag[i];
        }
    }
    return G;
}

namespace {

void balance_in_place(SquareMatrix& a) {
    const std::size_t n = a.size();
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0;
            double c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                double ginv = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= ginv;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

void hessenberg_in_place(SquareMatrix& a) {
    const std::size_t n = a.size();
    if (n < 3) return;
    std::vector<double> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t m0 = k + 1;
        double norm_sq = 0.0;
        for (std::size_t i = m0; i < n; ++i) norm_sq += a(i, k) * a(i, k);
        if (norm_sq == 0.0) continue;
        double norm = std::sqrt(norm_sq);
        if (a(m0, k) < 0.0) norm = -norm;
        for (std::size_t i = m0; i < n; ++i) v[i] = a(i, k);
        v[m0] += norm;
        double vtv = norm_sq + 2.0 * norm * a(m0, k) + norm * norm;
        if (vtv == 0.0) continue;
        double scale = 2.0 / vtv;
        // A <- (I - 2 v v^T / v^T v) A on rows m0..n-1
        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = m0; i < n; ++i) s += v[i] * a(i, j);
            s *= scale;
            for (std::size_t i = m0; i < n; ++i) a(i, j) -= s * v[i];
        }
        // A <- A (I - 2 v v^T / v^T v) on columns m0..n-1
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = m0; j < n; ++j) s += a(i, j) * v[j];
            s *= scale;
            for (std::size_t j = m0; j < n; ++j) a(i, j) -= s * v[j];
        }
        a(m0, k) = -norm;
        for (std::size_t i = m0 + 1; i < n; ++i) a(i, k) = 0.0;
    }
}

// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
std::vector<std::complex<double>> hessenberg_qr(SquareMatrix& h) {
    const int n = static_cast<int>(h.size());
    std::vector<std::complex<double>> eig(n);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    auto sign_of = [](double value, double sign_source) {
        return sign_source >= 0.0 ? std::abs(value) : -std::abs(value);
    };

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(h(i, j));

    int nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        int l;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(h(l, l - 1)) <= eps * s) {
                    h(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = h(nn, nn);
            if (l == nn) {
                eig[nn--] = x + t;
            } else {
                double y = h(nn - 1, nn - 1);
                double w = h(nn, nn - 1) * h(nn - 1, nn);
                if (l == nn - 1) {
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_of(z, p);
                        eig[nn - 1] = eig[nn] = x + z;
                        if (z != 0.0) eig[nn] = x - w / z;
                    } else {
                        eig[nn - 1] = std::complex<double>(x + p, -z);
                        eig[nn] = std::conj(eig[nn - 1]);
                    }
                    nn -= 2;
                } else {
                    if (its == 30)
                        throw numeric_error(
                            "eigenvalues: QR iteration failed to deflate");
                    double p = 0.0, q = 0.0, r = 0.0;
                    if (its == 10 || its == 20) {
                        t += x;
                        for (int i = 0; i <= nn; ++i) h(i, i) -= x;
                        double s = std::abs(h(nn, nn - 1)) + std::abs(h(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    for (m = nn - 2; m >= l; --m) {
                        double z = h(m, m);
                        double rr = x - z;
                        double ss = y - z;
                        p = (rr * ss - w) / h(m + 1, m) + h(m, m + 1);
                        q = h(m + 1, m + 1) - z - rr - ss;
                        r = h(m + 2, m + 1);
                        double s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        double u = std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r));
                        double v = std::abs(p) * (std::abs(h(m - 1, m - 1)) +
                                                  std::abs(z) + std::abs(h(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        h(i, i - 2) = 0.0;
                        if (i != m + 2) h(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = h(k, k - 1);
                            q = h(k + 1, k - 1);
                            r = k != nn - 1 ? h(k + 2, k - 1) : 0.0;
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) h(k, k - 1) = -h(k, k - 1);
                        } else {
                            h(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        double y2 = q / s;
                        double z2 = r / s;
                        q /= p;
                        r /= p;
                        for (int j = k; j <= nn; ++j) {
                            double pj = h(k, j) + q * h(k + 1, j);
                            if (k != nn - 1) {
                                pj += r * h(k + 2, j);
                                h(k + 2, j) -= pj * z2;
                            }
                            h(k + 1, j) -= pj * y2;
                            h(k, j) -= pj * x;
                        }
                        int mmin = nn < k + 3 ? nn : k + 3;
                        for (int i = l; i <= mmin; ++i) {
                            double pi = x * h(i, k) + y2 * h(i, k + 1);
                            if (k != nn - 1) {
                                pi += z2 * h(i, k + 2);
                                h(i, k + 2) -= pi * r;
                            }
                            h(i, k + 1) -= pi * q;
                            h(i, k) -= pi;
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
    return eig;
}

Vector matvec(const SquareMatrix& m, const Vector& v) {
    Vector out(m.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m.size(); ++j) acc += m(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

} // namespace

std::vector<std::complex<double>> eigenvalues(const SquareMatrix& M, bool balance) {
    if (M.size() == 0) return {};
    SquareMatrix work = M;
    if (balance) balance_in_place(work);
    hessenberg_in_place(work);
    auto eig = hessenberg_qr(work);
    std::sort(eig.begin(), eig.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  if (a.real() != b.real()) return a.real() < b.real();
                  return a.imag() < b.imag();
              });
    return eig;
}

std::vector<std::vector<double>> srrc_factor_products(
    const std::vector<std::complex<double>>& eigs, const std::vector<double>& alphas) {
    std::vector<std::vector<double>> rows;
    if (alphas.empty()) return rows;
    std::vector<std::complex<double>> t(eigs.begin(), eigs.end());
    auto magnitudes = [&t]() {
        std::vector<double> m(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) m[i] = std::abs(t[i]);
        return m;
    };
    rows.push_back(magnitudes());
    for (std::size_t k = 2; k <= alphas.size(); ++k) {
        double alpha_k = alphas[k - 1];
        double alpha_prev = alphas[k - 2];
        double shift = (1.0 - alpha_prev) / alpha_prev;
        for (std::size_t i = 0; i < t.size(); ++i)
            t[i] *= alpha_k * (eigs[i] + shift);
        rows.push_back(magnitudes());
    }
    return rows;
}

double srrt_recursion_check(const Problem& problem,
                            const std::vector<Vector>& betas,
                            const std::vector<double>& alphas,
                            const LduSplit& split) {
    if (problem.lambda != 0.0)
        throw std::invalid_argument(
            "srrt_recursion_check: only defined for lambda = 0");
    if (betas.size() < 4)
        throw std::invalid_argument("srrt_recursion_check: trace depth must be >= 4");
    if (alphas.empty())
        throw std::invalid_argument("srrt_recursion_check: no refinement factors");

    SquareMatrix G = gauss_seidel_matrix(split);
    const std::size_t p = split.size();

    auto difference = [&](std::size_t k) {
        Vector d(p);
        for (std::size_t i = 0; i < p; ++i) d[i] = betas[k][i] - betas[k - 1][i];
        return d;
    };

    double max_defect = 0.0;
    {
        Vector rhs = matvec(G, difference(1));
        Vector lhs = difference(2);
        double defect_sq = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            double d = lhs[i] - alphas[0] * rhs[i];
            defect_sq += d * d;
        }
        max_defect = std::sqrt(defect_sq);
    }
    std::size_t last_k = std::min(betas.size() - 1, alphas.size() + 1);
    for (std::size_t k = 3; k <= last_k; ++k) {
        Vector inner(p);
        Vector d_prev2 = difference(k - 2);
        Vector d_prev1 = difference(k - 1);
        double a_km2 = alphas[k - 3];
        double a_km1 = alphas[k - 2];
        for (std::size_t i = 0; i < p; ++i)
            inner[i] = (1.0 - a_km2) * d_prev2[i] + a_km1 * d_prev1[i];
        Vector rhs = matvec(G, inner);
        Vector lhs = difference(k);
        double defect_sq = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            double d = lhs[i] - rhs[i];
            defect_sq += d * d;
        }
        max_defect = std::max(max_defect, std::sqrt(defect_sq));
    }
    return max_defect;
}

} // namespace srrlasso
