#pragma once

#include <stdexcept>
#include <string>

namespace srrlasso {

// Malformed input file; carries the path and 1-based line number.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& path, std::size_t line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
          path_(path), line_(line) {}

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

// Non-finite value or iteration failure inside a numeric routine.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Refinement asked for on coinciding residuals; the caller should have
// declared convergence instead.
class degenerate_input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Problem exceeds a configured dense-storage ceiling.
class unsupported_scale_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace srrlasso
