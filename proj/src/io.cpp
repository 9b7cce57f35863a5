#include "srrlasso/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "srrlasso/errors.hpp"

namespace srrlasso {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& s : state_) s = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
    std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_gaussian() {
    if (spare_) {
        double v = *spare_;
        spare_.reset();
        return v;
    }
    // u1 in (0, 1] keeps the logarithm finite.
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    double u2 = next_unit();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    return radius * std::cos(angle);
}

std::pair<DesignMatrix, Vector> synth(const SyntheticSpec& spec) {
    if (spec.n == 0 || spec.p == 0)
        throw std::invalid_argument("synth: n and p must be positive");
    Rng rng(spec.seed);
    Vector values(spec.n * spec.p);
    for (std::size_t i = 0; i < spec.p; ++i) {
        for (;;) {
            bool all_zero = true;
            for (std::size_t j = 0; j < spec.n; ++j) {
                double v = rng.next_gaussian();
                values[i * spec.n + j] = v;
                if (v != 0.0) all_zero = false;
            }
            if (!all_zero) break;
            std::fprintf(stderr, "synth: regenerated all-zero column %zu\n", i);
        }
    }
    Vector y(spec.n);
    for (std::size_t j = 0; j < spec.n; ++j) y[j] = rng.next_gaussian();
    return {DesignMatrix(spec.n, spec.p, std::move(values)), std::move(y)};
}

namespace {

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path + ": " +
                                 std::strerror(errno));
    return in;
}

double parse_double(const std::string& token, const std::string& path,
                    std::size_t line_no) {
    const char* begin = token.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v))
        throw parse_error(path, line_no, "not a finite number: '" + token + "'");
    return v;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

} // namespace

LibsvmData read_libsvm(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    LibsvmData data;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string token;
        if (!(ss >> token))
            throw parse_error(path, line_no, "missing label");
        data.labels.push_back(parse_double(token, path, line_no));
        std::vector<std::pair<std::size_t, double>> row;
        std::size_t prev_index = 0;
        while (ss >> token) {
            auto colon = token.find(':');
            if (colon == std::string::npos)
                throw parse_error(path, line_no, "expected idx:val, got '" + token + "'");
            const std::string idx_str = token.substr(0, colon);
            char* end = nullptr;
            errno = 0;
            long long idx = std::strtoll(idx_str.c_str(), &end, 10);
            if (end == idx_str.c_str() || *end != '\0' || errno == ERANGE)
                throw parse_error(path, line_no, "bad feature index '" + idx_str + "'");
            if (idx <= 0)
                throw parse_error(path, line_no, "feature index must be positive, got " +
                                                     idx_str);
            auto index = static_cast<std::size_t>(idx);
            if (index <= prev_index)
                throw parse_error(path, line_no,
                                  "feature indices must be strictly ascending");
            prev_index = index;
            double value = parse_double(token.substr(colon + 1), path, line_no);
            row.emplace_back(index - 1, value);
            data.max_index = std::max(data.max_index, index);
        }
        data.rows.push_back(std::move(row));
    }
    if (data.rows.empty()) throw parse_error(path, 0, "empty file");
    return data;
}

std::pair<DesignMatrix, Vector> densify(const LibsvmData& data,
                                        std::optional<std::size_t> p) {
    std::size_t cols = p.value_or(data.max_index);
    if (cols < data.max_index)
        throw std::invalid_argument("densify: p smaller than the largest index");
    std::size_t n = data.rows.size();
    if (n * cols > 100000000ULL)
        throw unsupported_scale_error("densify: " + std::to_string(n * cols) +
                                      " entries exceed the 1e8 dense limit");
    Vector values(n * cols, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (const auto& [idx, val] : data.rows[j]) values[idx * n + j] = val;
    return {DesignMatrix(n, cols, std::move(values)), data.labels};
}

namespace {

std::vector<Vector> read_csv_rows(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<Vector> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        Vector row;
        std::size_t start = 0;
        for (;;) {
            std::size_t comma = line.find(',', start);
            std::string cell = line.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            row.push_back(parse_double(cell, path, line_no));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw parse_error(path, line_no,
                              "ragged row: expected " +
                                  std::to_string(rows.front().size()) + " cells, got " +
                                  std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw parse_error(path, 0, "empty file");
    return rows;
}

DesignMatrix matrix_from_rows(const std::vector<Vector>& rows, std::size_t first_col,
                              std::size_t cols) {
    std::size_t n = rows.size();
    Vector values(n * cols);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < cols; ++i)
            values[i * n + j] = rows[j][first_col + i];
    return DesignMatrix(n, cols, std::move(values));
}

} // namespace

std::pair<DesignMatrix, Vector> read_dense_csv(const std::string& path_X,
                                               const std::string& path_y) {
    auto x_rows = read_csv_rows(path_X);
    auto y_rows = read_csv_rows(path_y);
    if (y_rows.front().size() != 1)
        throw parse_error(path_y, 1, "response file must have a single column");
    if (y_rows.size() != x_rows.size())
        throw parse_error(path_y, 1,
                          "row count mismatch: X has " + std::to_string(x_rows.size()) +
                              " rows, y has " + std::to_string(y_rows.size()));
    Vector y(x_rows.size());
    for (std::size_t j = 0; j < y.size(); ++j) y[j] = y_rows[j][0];
    return {matrix_from_rows(x_rows, 0, x_rows.front().size()), std::move(y)};
}

std::pair<DesignMatrix, Vector> read_problem_csv(const std::string& path) {
    auto rows = read_csv_rows(path);
    if (rows.front().size() < 2)
        throw parse_error(path, 1, "expected at least two columns (X and response)");
    std::size_t p = rows.front().size() - 1;
    Vector y(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) y[j] = rows[j][p];
    return {matrix_from_rows(rows, 0, p), std::move(y)};
}

namespace {

std::ofstream create_or_throw(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot create " + path + ": " +
                                 std::strerror(errno));
    return out;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_matrix_csv(const std::string& path, const DesignMatrix& X) {
    std::ofstream out = create_or_throw(path);
    for (std::size_t j = 0; j < X.rows(); ++j) {
        for (std::size_t i = 0; i < X.cols(); ++i) {
            if (i) out << ',';
            out << format_double(X.col(i)[j]);
        }
        out << '\n';
    }
    if (!out.flush())
        throw std::runtime_error("write failed for " + path);
}

void write_vector_csv(const std::string& path, const Vector& v) {
    std::ofstream out = create_or_throw(path);
    for (double x : v) out << format_double(x) << '\n';
    if (!out.flush())
        throw std::runtime_error("write failed for " + path);
}

void write_trace(const IterationTrace& trace, const std::string& path,
                 TraceFormat format) {
    std::ofstream out = create_or_throw(path);
    if (format == TraceFormat::csv) {
        out << "k,f,alpha,step_norm,sparsity\n";
        for (const TraceRow& row : trace.rows) {
            out << row.sweep << ',' << format_double(row.objective) << ',';
            if (row.alpha) out << format_double(*row.alpha);
            out << ',' << format_double(row.step_norm) << ','
                << format_double(row.sparsity) << '\n';
        }
    } else {
        for (const TraceRow& row : trace.rows) {
            out << "{\"k\":" << row.sweep << ",\"f\":" << format_double(row.objective)
                << ",\"alpha\":";
            if (row.alpha)
                out << format_double(*row.alpha);
            else
                out << "null";
            out << ",\"step_norm\":" << format_double(row.step_norm)
                << ",\"sparsity\":" << format_double(row.sparsity) << "}\n";
        }
    }
    if (!out.flush())
        throw std::runtime_error("write failed for " + path);
}

IterationTrace read_trace(const std::string& path, TraceFormat format) {
    std::ifstream in = open_or_throw(path);
    IterationTrace trace;
    std::string line;
    std::size_t line_no = 0;
    if (format == TraceFormat::csv) {
        if (!std::getline(in, line)) throw parse_error(path, 0, "empty trace");
        ++line_no;
        strip_cr(line);
        if (line != "k,f,alpha,step_norm,sparsity")
            throw parse_error(path, 1, "unexpected trace header '" + line + "'");
        while (std::getline(in, line)) {
            ++line_no;
            strip_cr(line);
            if (line.empty()) continue;
            std::vector<std::string> cells;
            std::size_t start = 0;
            for (;;) {
                std::size_t comma = line.find(',', start);
                cells.push_back(line.substr(
                    start,
                    comma == std::string::npos ? std::string::npos : comma - start));
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            if (cells.size() != 5)
                throw parse_error(path, line_no, "expected 5 cells");
            TraceRow row;
            row.sweep = static_cast<std::size_t>(
                std::strtoull(cells[0].c_str(), nullptr, 10));
            row.objective = parse_double(cells[1], path, line_no);
            if (!cells[2].empty()) row.alpha = parse_double(cells[2], path, line_no);
            row.step_norm = parse_double(cells[3], path, line_no);
            row.sparsity = parse_double(cells[4], path, line_no);
            trace.rows.push_back(row);
        }
    } else {
        while (std::getline(in, line)) {
            ++line_no;
            strip_cr(line);
            if (line.empty()) continue;
            nlohmann::json obj;
            try {
                obj = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw parse_error(path, line_no, e.what());
            }
            TraceRow row;
            row.sweep = obj.at("k").get<std::size_t>();
            row.objective = obj.at("f").get<double>();
            if (!obj.at("alpha").is_null()) row.alpha = obj.at("alpha").get<double>();
            row.step_norm = obj.at("step_norm").get<double>();
            row.sparsity = obj.at("sparsity").get<double>();
            trace.rows.push_back(row);
        }
    }
    return trace;
}

std::vector<double> alphas_from_trace(const IterationTrace& trace) {
    std::vector<double> alphas;
    for (std::size_t i = 1; i < trace.rows.size(); ++i)
        if (trace.rows[i].alpha) alphas.push_back(*trace.rows[i].alpha);
    return alphas;
}

} // namespace srrlasso
