#include "srrlasso/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "srrlasso/errors.hpp"
#include "srrlasso/io.hpp"

namespace srrlasso {

double lambda_from_ratio(const DesignMatrix& X, const Vector& y, double r) {
    if (!(r >= 0.0))
        throw std::invalid_argument("lambda_from_ratio: ratio must be nonnegative");
    return r * norm_inf(X.multiply_transposed(y));
}

double BenchCell::mean_sweeps() const {
    double acc = 0.0;
    for (const BenchRun& run : runs) acc += static_cast<double>(run.sweeps);
    return runs.empty() ? 0.0 : acc / static_cast<double>(runs.size());
}

bool BenchCell::all_converged() const {
    for (const BenchRun& run : runs)
        if (!run.converged) return false;
    return true;
}

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::cd: return "cd";
        case Variant::srrc: return "srrc";
        case Variant::srrt: return "srrt";
    }
    return "?";
}

namespace {

void validate(const BenchProtocol& protocol) {
    if (protocol.repeats < 1)
        throw std::invalid_argument("bench: repeats must be >= 1");
    if (protocol.ratios.empty())
        throw std::invalid_argument("bench: at least one ratio is required");
    for (double r : protocol.ratios)
        if (!(r > 0.0 && r <= 1.0))
            throw std::invalid_argument("bench: ratios must lie in (0, 1]");
    if (protocol.variants.empty() || protocol.variants.front() != Variant::cd)
        throw std::invalid_argument(
            "bench: the variant list must start with cd (it sets the target)");
}

// All solver runs for one (ratio, seed) pair.
std::vector<BenchRun> run_cell(Problem& problem, double ratio, std::uint64_t seed,
                               const BenchProtocol& protocol) {
    problem.lambda = lambda_from_ratio(problem.X, problem.y, ratio);

    std::vector<BenchRun> runs;
    SolverConfig cd_config;
    cd_config.variant = Variant::cd;
    cd_config.step_tol = protocol.cd_step_tol;
    cd_config.max_sweeps = protocol.max_sweeps;
    cd_config.record_trace = false;
    SolveResult cd = solve(problem, cd_config);

    double zeros = 0.0;
    for (double v : cd.beta)
        if (v == 0.0) zeros += 1.0;
    runs.push_back({seed, problem.lambda, cd.sweeps, cd.final_objective,
                    zeros / static_cast<double>(problem.p()), cd.converged});

    for (std::size_t vi = 1; vi < protocol.variants.size(); ++vi) {
        SolverConfig config;
        config.variant = protocol.variants[vi];
        config.target_objective = cd.final_objective;
        config.max_sweeps = protocol.max_sweeps;
        config.record_trace = false;
        SolveResult res = solve(problem, config);
        double szeros = 0.0;
        for (double v : res.beta)
            if (v == 0.0) szeros += 1.0;
        bool ok = res.converged && res.final_objective <= cd.final_objective;
        runs.push_back({seed, problem.lambda, res.sweeps, res.final_objective,
                        szeros / static_cast<double>(problem.p()), ok});
    }
    return runs;
}

BenchTable assemble(const BenchProtocol& protocol,
                    const std::vector<std::vector<std::vector<BenchRun>>>& by_ratio) {
    BenchTable table;
    table.repeats = by_ratio.front().size();
    table.cd_step_tol = protocol.cd_step_tol;
    table.base_seed = protocol.base_seed;
    for (std::size_t ri = 0; ri < protocol.ratios.size(); ++ri) {
        BenchRow row;
        row.ratio = protocol.ratios[ri];
        for (std::size_t vi = 0; vi < protocol.variants.size(); ++vi) {
            BenchCell cell;
            cell.variant = protocol.variants[vi];
            for (const auto& runs : by_ratio[ri]) cell.runs.push_back(runs[vi]);
            row.cells.push_back(std::move(cell));
        }
        double acc = 0.0;
        for (const BenchRun& run : row.cells.front().runs) acc += run.sparsity;
        row.mean_sparsity = acc / static_cast<double>(row.cells.front().runs.size());
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace

BenchTable run_bench(const Problem& problem, const BenchProtocol& protocol) {
    validate(protocol);
    // File-backed problems are deterministic, so a single repeat is run and
    // ratios are processed sequentially on one shared copy.
    std::vector<std::vector<std::vector<BenchRun>>> by_ratio(protocol.ratios.size());
    Problem work = problem;
    for (std::size_t ri = 0; ri < protocol.ratios.size(); ++ri)
        by_ratio[ri].push_back(
            run_cell(work, protocol.ratios[ri], protocol.base_seed, protocol));
    BenchTable table = assemble(protocol, by_ratio);
    table.synthetic = false;
    table.n = problem.n();
    table.p = problem.p();
    table.repeats = 1;
    return table;
}

BenchTable run_bench_synthetic(std::size_t n, std::size_t p,
                               const BenchProtocol& protocol) {
    validate(protocol);
    std::vector<std::vector<std::vector<BenchRun>>> by_ratio(
        protocol.ratios.size(),
        std::vector<std::vector<BenchRun>>(protocol.repeats));

    struct Task {
        std::size_t ratio_index;
        std::size_t run_index;
    };
    std::vector<Task> tasks;
    for (std::size_t ri = 0; ri < protocol.ratios.size(); ++ri)
        for (std::size_t run = 0; run < protocol.repeats; ++run)
            tasks.push_back({ri, run});

    unsigned jobs = std::max(1u, protocol.jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t idx = next.fetch_add(1);
            if (idx >= tasks.size()) return;
            const Task& task = tasks[idx];
            std::uint64_t seed = protocol.base_seed + task.run_index;
            auto [X, y] = synth({n, p, seed});
            Problem problem(std::move(X), std::move(y), 0.0);
            by_ratio[task.ratio_index][task.run_index] =
                run_cell(problem, protocol.ratios[task.ratio_index], seed, protocol);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    BenchTable table = assemble(protocol, by_ratio);
    table.synthetic = true;
    table.n = n;
    table.p = p;
    return table;
}

namespace {

std::string short_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

} // namespace

std::string render_table(const BenchTable& table) {
    std::ostringstream out;
    out << "# " << (table.synthetic ? "synthetic" : "file") << " n=" << table.n
        << " p=" << table.p << " repeats=" << table.repeats;
    if (table.synthetic)
        out << " seeds=" << table.base_seed << ".."
            << table.base_seed + table.repeats - 1;
    out << " cd_step_tol=" << short_double(table.cd_step_tol) << "\n";
    if (!table.synthetic)
        out << "# file input: single run per ratio (no repeats)\n";
    out << "ratio";
    for (const BenchCell& cell : table.rows.front().cells)
        out << '\t' << variant_name(cell.variant);
    out << "\tsparsity\n";
    for (const BenchRow& row : table.rows) {
        out << short_double(row.ratio);
        for (const BenchCell& cell : row.cells) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.1f", cell.mean_sweeps());
            out << '\t' << buf;
            if (!cell.all_converged()) out << '*';
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4f", row.mean_sparsity);
        out << '\t' << buf << '\n';
    }
    bool starred = false;
    for (const BenchRow& row : table.rows)
        for (const BenchCell& cell : row.cells)
            if (!cell.all_converged()) starred = true;
    if (starred) out << "# * at least one run hit the sweep limit\n";
    return out.str();
}

std::string render_csv(const BenchTable& table) {
    std::ostringstream out;
    out << "# source=" << (table.synthetic ? "synthetic" : "file") << ",n="
        << table.n << ",p=" << table.p << ",repeats=" << table.repeats
        << ",base_seed=" << table.base_seed
        << ",cd_step_tol=" << short_double(table.cd_step_tol) << "\n";
    out << "ratio,variant,seed,lambda,sweeps,converged,final_objective,sparsity\n";
    char buf[64];
    for (const BenchRow& row : table.rows) {
        for (const BenchCell& cell : row.cells) {
            for (const BenchRun& run : cell.runs) {
                std::snprintf(buf, sizeof buf, "%.17g", run.lambda);
                out << short_double(row.ratio) << ',' << variant_name(cell.variant)
                    << ',' << run.seed << ',' << buf << ',' << run.sweeps << ','
                    << (run.converged ? 1 : 0) << ',';
                std::snprintf(buf, sizeof buf, "%.17g", run.final_objective);
                out << buf << ',';
                std::snprintf(buf, sizeof buf, "%.17g", run.sparsity);
                out << buf << '\n';
            }
        }
    }
    return out.str();
}

} // namespace srrlasso
