#pragma once

#include <array>
#include <cstdint>

#include "srrlasso/io.hpp"
#include "srrlasso/linalg.hpp"

namespace fixtures {

// The 5x5 demonstration instance, row-major as printed.
inline constexpr std::array<std::array<double, 5>, 5> kX = {{
    {-0.204708, 0.478943, -0.519439, -0.555730, 1.965781},
    {1.393406, 0.092908, 0.281746, 0.769023, 1.246435},
    {1.007189, -1.296221, 0.274992, 0.228913, 1.352917},
    {0.886429, -2.001637, -0.371843, 1.669025, -0.438570},
    {-0.539741, 0.476985, 3.248944, -1.021228, -0.577087},
}};

inline constexpr std::array<double, 5> kY = {0.124121, 0.302614, 0.523772,
                                             0.000940, 1.343810};

inline srrlasso::DesignMatrix demo_matrix() {
    srrlasso::Vector values(25);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) values[i * 5 + j] = kX[j][i];
    return srrlasso::DesignMatrix(5, 5, std::move(values));
}

inline srrlasso::Problem demo_problem(double lambda = 0.0) {
    return srrlasso::Problem(demo_matrix(),
                             srrlasso::Vector(kY.begin(), kY.end()), lambda);
}

// Random small instance with entries of order one; no zero columns in
// practice, and the constructor would reject one anyway.
inline srrlasso::Problem random_problem(std::uint64_t seed, std::size_t n,
                                        std::size_t p, double lambda) {
    auto [X, y] = srrlasso::synth({n, p, seed});
    return srrlasso::Problem(std::move(X), std::move(y), lambda);
}

} // namespace fixtures
