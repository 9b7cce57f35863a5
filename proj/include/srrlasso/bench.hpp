#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srrlasso/linalg.hpp"
#include "srrlasso/solver.hpp"

namespace srrlasso {

// r * ||X^T y||_inf
double lambda_from_ratio(const DesignMatrix& X, const Vector& y, double r);

struct BenchProtocol {
    std::vector<double> ratios{0.5, 0.1, 0.05, 0.01};
    double cd_step_tol = 1e-6;
    std::size_t repeats = 10;  // synthetic runs only; file inputs use 1
    std::vector<Variant> variants{Variant::cd, Variant::srrc, Variant::srrt};
    std::size_t max_sweeps = 200000;
    std::uint64_t base_seed = 1;  // run i uses base_seed + i
    unsigned jobs = 1;
};

struct BenchRun {
    std::uint64_t seed = 0;
    double lambda = 0.0;
    std::size_t sweeps = 0;
    double final_objective = 0.0;
    double sparsity = 0.0;
    bool converged = false;
};

struct BenchCell {
    Variant variant;
    std::vector<BenchRun> runs;

    double mean_sweeps() const;
    bool all_converged() const;
};

struct BenchRow {
    double ratio = 0.0;
    std::vector<BenchCell> cells;  // one per protocol variant, in order
    double mean_sparsity = 0.0;    // of the plain-CD solutions
};

struct BenchTable {
    bool synthetic = false;
    std::size_t n = 0;
    std::size_t p = 0;
    std::size_t repeats = 1;
    std::uint64_t base_seed = 0;
    double cd_step_tol = 0.0;
    std::vector<BenchRow> rows;
};

// Protocol per (ratio, seed): run plain coordinate descent to the step
// tolerance, then run each SRR variant until its objective reaches the value
// coordinate descent achieved. The reported sparsity is that of the
// coordinate-descent solutions.
BenchTable run_bench(const Problem& problem, const BenchProtocol& protocol);
BenchTable run_bench_synthetic(std::size_t n, std::size_t p,
                               const BenchProtocol& protocol);

// Human-readable summary table.
std::string render_table(const BenchTable& table);

// One CSV row per (ratio, variant, seed); header lines carry the protocol.
std::string render_csv(const BenchTable& table);

const char* variant_name(Variant v);

} // namespace srrlasso
