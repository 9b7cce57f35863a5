// Command-line front end: solve a problem with a chosen variant, run the
// benchmark protocol, generate synthetic problems, and emit spectral
// diagnostics.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "srrlasso/bench.hpp"
#include "srrlasso/errors.hpp"
#include "srrlasso/io.hpp"
#include "srrlasso/solver.hpp"
#include "srrlasso/spectral.hpp"

namespace {

using namespace srrlasso;

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct InputOptions {
    std::string path;
    std::string format = "auto";  // auto | csv | libsvm
    std::string response;         // separate response file for csv pairs
    std::size_t num_features = 0; // libsvm width override
    bool normalize = false;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("--input", in.path, "problem file (csv or libsvm)")->required();
    cmd->add_option("--format", in.format, "input format: auto, csv, libsvm")
        ->check(CLI::IsMember({"auto", "csv", "libsvm"}));
    cmd->add_option("--response", in.response,
                    "separate single-column response csv (X in --input)");
    cmd->add_option("--num-features", in.num_features,
                    "libsvm: densify to this many columns");
    cmd->add_flag("--normalize", in.normalize, "scale columns to unit norm");
}

DesignMatrix normalize_columns(const DesignMatrix& X) {
    Vector values(X.rows() * X.cols());
    for (std::size_t i = 0; i < X.cols(); ++i) {
        double inv = 1.0 / std::sqrt(X.col_norm_sq(i));
        for (std::size_t j = 0; j < X.rows(); ++j)
            values[i * X.rows() + j] = X.col(i)[j] * inv;
    }
    return DesignMatrix(X.rows(), X.cols(), std::move(values));
}

std::pair<DesignMatrix, Vector> load_input(const InputOptions& in) {
    std::string format = in.format;
    if (format == "auto")
        format = ends_with(in.path, ".csv") ? "csv" : "libsvm";
    std::pair<DesignMatrix, Vector> loaded = [&] {
        if (format == "csv") {
            if (!in.response.empty()) return read_dense_csv(in.path, in.response);
            return read_problem_csv(in.path);
        }
        LibsvmData data = read_libsvm(in.path);
        return densify(data, in.num_features ? std::optional(in.num_features)
                                             : std::nullopt);
    }();
    if (in.normalize) loaded.first = normalize_columns(loaded.first);
    return loaded;
}

TraceFormat trace_format_for(const std::string& path, const std::string& format) {
    if (format == "csv") return TraceFormat::csv;
    if (format == "jsonl") return TraceFormat::json_lines;
    return ends_with(path, ".csv") ? TraceFormat::csv : TraceFormat::json_lines;
}

Variant parse_variant(const std::string& name) {
    if (name == "cd") return Variant::cd;
    if (name == "srrc") return Variant::srrc;
    if (name == "srrt") return Variant::srrt;
    throw std::invalid_argument("unknown variant '" + name + "'");
}

int run_solve(const InputOptions& in, double lambda, bool have_lambda, double ratio,
              bool have_ratio, const std::string& variant,
              const std::string& refine, double step_tol, std::size_t max_sweeps,
              const std::string& trace_path, const std::string& trace_format) {
    auto [X, y] = load_input(in);
    if (!have_lambda && !have_ratio) {
        std::cerr << "solve: one of --lambda or --ratio is required\n";
        return 1;
    }
    double effective_lambda = have_lambda ? lambda : lambda_from_ratio(X, y, ratio);
    Problem problem(std::move(X), std::move(y), effective_lambda);

    SolverConfig config;
    config.variant = parse_variant(variant);
    if (step_tol > 0.0) config.step_tol = step_tol;
    config.max_sweeps = max_sweeps;
    if (refine == "sort")
        config.refine = RefineMethod::sort;
    else if (refine == "bisection")
        config.refine = RefineMethod::bisection;

    SolveResult result = solve(problem, config);

    if (!trace_path.empty())
        write_trace(result.trace, trace_path,
                    trace_format_for(trace_path, trace_format));

    double zeros = 0.0;
    for (double v : result.beta)
        if (v == 0.0) zeros += 1.0;
    std::printf("variant: %s\n", variant.c_str());
    std::printf("lambda: %.17g\n", problem.lambda);
    std::printf("sweeps: %zu\n", result.sweeps);
    std::printf("f: %.17g\n", result.final_objective);
    std::printf("sparsity: %.17g\n", zeros / static_cast<double>(problem.p()));
    std::printf("status: %s\n", result.converged ? "converged" : "sweep-limit");
    return result.converged ? 0 : 2;
}

unsigned default_jobs() {
    if (const char* env = std::getenv("SRR_LASSO_JOBS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return 1;
}

int run_bench_cmd(const InputOptions& in, bool have_input, std::size_t n,
                  std::size_t p, const std::vector<double>& ratios,
                  const std::vector<std::string>& variants, std::size_t repeats,
                  std::uint64_t base_seed, double step_tol, std::size_t max_sweeps,
                  unsigned jobs, const std::string& out_path) {
    BenchProtocol protocol;
    if (!ratios.empty()) protocol.ratios = ratios;
    protocol.cd_step_tol = step_tol;
    protocol.repeats = repeats;
    protocol.max_sweeps = max_sweeps;
    protocol.base_seed = base_seed;
    protocol.jobs = jobs;
    if (!variants.empty()) {
        protocol.variants.clear();
        for (const std::string& name : variants)
            protocol.variants.push_back(parse_variant(name));
    }

    BenchTable table;
    if (have_input) {
        auto [X, y] = load_input(in);
        Problem problem(std::move(X), std::move(y), 0.0);
        table = run_bench(problem, protocol);
    } else {
        if (n == 0 || p == 0) {
            std::cerr << "bench: either --input or both --n and --p are required\n";
            return 1;
        }
        table = run_bench_synthetic(n, p, protocol);
    }

    std::fputs(render_table(table).c_str(), stdout);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "bench: cannot create " << out_path << "\n";
            return 1;
        }
        out << render_csv(table);
    }
    return 0;
}

int run_synth(std::size_t n, std::size_t p, std::uint64_t seed,
              const std::string& out_x, const std::string& out_y) {
    auto [X, y] = synth({n, p, seed});
    write_matrix_csv(out_x, X);
    write_vector_csv(out_y, y);
    return 0;
}

int run_eigen(const InputOptions& in, const std::string& alphas_path,
              const std::string& trace_format, const std::string& out_path) {
    auto [X, y] = load_input(in);

    EigenReport report;
    LduSplit split = ldu_split(X);
    SquareMatrix G = gauss_seidel_matrix(split);
    report.eigenvalues = eigenvalues(G);
    for (const auto& v : report.eigenvalues)
        report.max_magnitude = std::max(report.max_magnitude, std::abs(v));

    if (!alphas_path.empty()) {
        IterationTrace trace =
            read_trace(alphas_path, trace_format_for(alphas_path, trace_format));
        std::vector<double> alphas = alphas_from_trace(trace);
        if (alphas.empty()) {
            std::cerr << "eigen: the trace carries no refinement factors\n";
            return 1;
        }
        report.t_products = srrc_factor_products(report.eigenvalues, alphas);
    }

    const double bound = 1.0 + 1e-9;
    bool ok = report.max_magnitude <= bound;

    nlohmann::ordered_json doc;
    doc["p"] = X.cols();
    doc["eigenvalues"] = nlohmann::ordered_json::array();
    for (const auto& v : report.eigenvalues)
        doc["eigenvalues"].push_back({{"re", v.real()}, {"im", v.imag()}});
    doc["max_magnitude"] = report.max_magnitude;
    doc["bound"] = bound;
    doc["bound_satisfied"] = ok;
    if (!report.t_products.empty()) doc["t_products"] = report.t_products;

    std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "eigen: cannot create " << out_path << "\n";
            return 1;
        }
        out << text;
    }
    if (!ok) {
        std::cerr << "eigen: spectral bound violated: max magnitude "
                  << report.max_magnitude << "\n";
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lasso coordinate descent with successive ray refinement"};
    app.require_subcommand(1);

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "solve one problem");
    InputOptions solve_in;
    add_input_options(solve_cmd, solve_in);
    double lambda = 0.0, ratio = 0.0;
    auto* lambda_opt = solve_cmd->add_option("--lambda", lambda,
                                             "regularization parameter");
    auto* ratio_opt = solve_cmd->add_option(
        "--ratio", ratio, "lambda as a fraction of the max correlation");
    lambda_opt->excludes(ratio_opt);
    ratio_opt->excludes(lambda_opt);
    std::string variant = "cd";
    solve_cmd->add_option("--variant", variant, "cd, srrc, or srrt")
        ->check(CLI::IsMember({"cd", "srrc", "srrt"}));
    std::string refine = "auto";
    solve_cmd->add_option("--refine", refine, "auto, sort, or bisection")
        ->check(CLI::IsMember({"auto", "sort", "bisection"}));
    double step_tol = 1e-5;
    solve_cmd->add_option("--step-tol", step_tol,
                          "stop when the sweep step norm drops below (0 disables)");
    std::size_t max_sweeps = 10000;
    solve_cmd->add_option("--max-sweeps", max_sweeps, "sweep budget");
    std::string trace_path, trace_format = "auto";
    solve_cmd->add_option("--trace", trace_path, "write the per-sweep trace here");
    solve_cmd->add_option("--trace-format", trace_format, "auto, jsonl, or csv")
        ->check(CLI::IsMember({"auto", "jsonl", "csv"}));

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "run the benchmark protocol");
    InputOptions bench_in;
    auto* bench_input =
        bench_cmd->add_option("--input", bench_in.path, "problem file");
    bench_cmd->add_option("--format", bench_in.format, "input format")
        ->check(CLI::IsMember({"auto", "csv", "libsvm"}));
    bench_cmd->add_option("--response", bench_in.response, "response csv");
    bench_cmd->add_option("--num-features", bench_in.num_features,
                          "libsvm width override");
    bench_cmd->add_flag("--normalize", bench_in.normalize,
                        "scale columns to unit norm");
    std::size_t bench_n = 0, bench_p = 0;
    bench_cmd->add_option("--n", bench_n, "synthetic sample count")
        ->excludes(bench_input);
    bench_cmd->add_option("--p", bench_p, "synthetic variable count")
        ->excludes(bench_input);
    std::vector<double> ratios;
    bench_cmd->add_option("--ratios", ratios, "comma-separated ratio list")
        ->delimiter(',');
    std::vector<std::string> variants;
    bench_cmd->add_option("--variants", variants, "comma-separated variant list")
        ->delimiter(',');
    std::size_t repeats = 10;
    bench_cmd->add_option("--repeats", repeats, "seeds per synthetic cell");
    std::uint64_t base_seed = 1;
    bench_cmd->add_option("--base-seed", base_seed, "first synthetic seed");
    double bench_tol = 1e-6;
    bench_cmd->add_option("--step-tol", bench_tol, "coordinate-descent stop rule");
    std::size_t bench_sweeps = 200000;
    bench_cmd->add_option("--max-sweeps", bench_sweeps, "sweep budget per run");
    unsigned jobs = default_jobs();
    bench_cmd->add_option("--jobs", jobs, "parallel bench cells");
    std::string bench_out;
    bench_cmd->add_option("--out", bench_out, "machine-readable csv path");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic problem");
    std::size_t synth_n = 0, synth_p = 0;
    std::uint64_t synth_seed = 0;
    std::string out_x, out_y;
    synth_cmd->add_option("--n", synth_n, "sample count")->required();
    synth_cmd->add_option("--p", synth_p, "variable count")->required();
    synth_cmd->add_option("--seed", synth_seed, "generator seed")->required();
    synth_cmd->add_option("--out-x", out_x, "design matrix csv")->required();
    synth_cmd->add_option("--out-y", out_y, "response csv")->required();

    // eigen
    auto* eigen_cmd =
        app.add_subcommand("eigen", "gauss-seidel spectrum diagnostics");
    InputOptions eigen_in;
    add_input_options(eigen_cmd, eigen_in);
    std::string alphas_path, eigen_trace_format = "auto", eigen_out;
    eigen_cmd->add_option("--alphas-from", alphas_path,
                          "trace file supplying refinement factors");
    eigen_cmd->add_option("--trace-format", eigen_trace_format,
                          "auto, jsonl, or csv")
        ->check(CLI::IsMember({"auto", "jsonl", "csv"}));
    eigen_cmd->add_option("--out", eigen_out, "write the json report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return 1;
    }

    try {
        if (solve_cmd->parsed())
            return run_solve(solve_in, lambda, lambda_opt->count() > 0, ratio,
                             ratio_opt->count() > 0, variant, refine, step_tol,
                             max_sweeps, trace_path, trace_format);
        if (bench_cmd->parsed())
            return run_bench_cmd(bench_in, bench_input->count() > 0, bench_n,
                                 bench_p, ratios, variants, repeats, base_seed,
                                 bench_tol, bench_sweeps, jobs, bench_out);
        if (synth_cmd->parsed())
            return run_synth(synth_n, synth_p, synth_seed, out_x, out_y);
        if (eigen_cmd->parsed())
            return run_eigen(eigen_in, alphas_path, eigen_trace_format, eigen_out);
    } catch (const unsupported_scale_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
