#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "srrlasso/linalg.hpp"
#include "srrlasso/solver.hpp"

namespace srrlasso {

// xoshiro256++ with splitmix64 seeding; Gaussians via Box-Muller pairs.
// Fully specified so that a seed reproduces the same stream everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    // uniform in [0, 1), 53 bits
    double next_unit();
    double next_gaussian();

private:
    std::uint64_t state_[4];
    std::optional<double> spare_;
};

struct SyntheticSpec {
    std::size_t n = 0;
    std::size_t p = 0;
    std::uint64_t seed = 0;
    enum class Distribution { standard_gaussian } distribution =
        Distribution::standard_gaussian;
};

// Deterministic synthetic problem components; lambda is chosen later.
std::pair<DesignMatrix, Vector> synth(const SyntheticSpec& spec);

// One parsed `label idx:val ...` line; indices are 1-based in the file and
// stored 0-based here.
struct LibsvmData {
    std::vector<std::vector<std::pair<std::size_t, double>>> rows;
    Vector labels;
    std::size_t max_index = 0;  // largest 1-based index seen
};

LibsvmData read_libsvm(const std::string& path);

// Densifies parsed records into a column-major matrix with p columns
// (defaults to the largest index seen). Guarded at 1e8 entries.
std::pair<DesignMatrix, Vector> densify(const LibsvmData& data,
                                        std::optional<std::size_t> p = std::nullopt);

// Numeric CSV pair: X from one file, y from another (single column).
std::pair<DesignMatrix, Vector> read_dense_csv(const std::string& path_X,
                                               const std::string& path_y);

// Combined numeric CSV: p+1 columns, response last.
std::pair<DesignMatrix, Vector> read_problem_csv(const std::string& path);

void write_matrix_csv(const std::string& path, const DesignMatrix& X);
void write_vector_csv(const std::string& path, const Vector& v);

enum class TraceFormat { json_lines, csv };

// One record per sweep with fields k, f, alpha (nullable), step_norm,
// sparsity; values round-trip at 17 significant digits.
void write_trace(const IterationTrace& trace, const std::string& path,
                 TraceFormat format);
IterationTrace read_trace(const std::string& path, TraceFormat format);

// Refinement factors in computation order, recovered from a trace: row k of
// a trace carries the factor computed at the end of sweep k-1.
std::vector<double> alphas_from_trace(const IterationTrace& trace);

} // namespace srrlasso
