#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "fixtures.hpp"
#include "refine_oracle.hpp"
#include "srrlasso/errors.hpp"
#include "srrlasso/refine.hpp"
#include "srrlasso/solver.hpp"

using namespace srrlasso;

namespace {

RefinementInput as_input(const oracle::Instance& inst) {
    return {inst.h, inst.beta, inst.r_h, inst.r, inst.problem.lambda};
}

} // namespace

TEST_CASE("subgradient is a single line when lambda is zero") {
    oracle::Instance inst = oracle::make_instance(3, /*lambda_zero=*/true);
    RefinementInput input = as_input(inst);
    for (double alpha : {0.25, 1.0, 3.5}) {
        auto [lo, hi] = subgradient_interval(input, alpha);
        CHECK(lo == hi);
        double d_sq = 0.0, rh_d = 0.0;
        for (std::size_t j = 0; j < inst.r_h.size(); ++j) {
            double d = inst.r_h[j] - inst.r[j];
            d_sq += d * d;
            rh_d += inst.r_h[j] * d;
        }
        CHECK(lo == doctest::Approx(alpha * d_sq - rh_d).epsilon(1e-12));
    }
}

TEST_CASE("subgradient of the one-variable instance") {
    // X = (1), y = (1), h = 0, beta = 0.5, lambda = 0.2:
    // g(alpha) = 0.5*(1 - 0.5*alpha)^2 + 0.1*alpha, dg(1) = -0.15
    Problem problem(DesignMatrix(1, 1, {1.0}), {1.0}, 0.2);
    Vector h = {0.0}, beta = {0.5};
    Vector r_h = residual(problem, h), r = residual(problem, beta);
    RefinementInput input{h, beta, r_h, r, problem.lambda};
    auto [lo, hi] = subgradient_interval(input, 1.0);
    CHECK(lo == doctest::Approx(-0.15).epsilon(1e-12));
    CHECK(hi == doctest::Approx(-0.15).epsilon(1e-12));
    CHECK_THROWS_AS(subgradient_interval(input, 0.0), std::invalid_argument);
}

TEST_CASE("subgradient jumps across a breakpoint") {
    // h = (1), beta = (-1): w = 0.5; r_h = 0, r = 2 with X = (1), y = (1)
    Problem problem(DesignMatrix(1, 1, {1.0}), {1.0}, 0.3);
    Vector h = {1.0}, beta = {-1.0};
    Vector r_h = residual(problem, h), r = residual(problem, beta);
    RefinementInput input{h, beta, r_h, r, problem.lambda};

    auto at_w = subgradient_interval(input, 0.5);
    CHECK(at_w.lo == doctest::Approx(1.4).epsilon(1e-12));
    CHECK(at_w.hi == doctest::Approx(2.6).epsilon(1e-12));
    CHECK(at_w.hi - at_w.lo == doctest::Approx(2.0 * 0.3 * 2.0).epsilon(1e-12));

    auto below = subgradient_interval(input, 0.5 - 1e-9);
    auto above = subgradient_interval(input, 0.5 + 1e-9);
    CHECK(below.lo == below.hi);
    CHECK(above.lo == above.hi);
    CHECK(below.lo < at_w.lo + 1e-6);
    CHECK(above.hi > at_w.hi - 1e-6);
}

TEST_CASE("coordinates with equal h and beta contribute nothing") {
    Problem problem(DesignMatrix(1, 2, {1.0, -2.0}), {1.0}, 0.4);
    Vector h = {0.7, 0.3}, beta = {0.7, 0.9};
    Vector r_h = residual(problem, h), r = residual(problem, beta);
    RefinementInput input{h, beta, r_h, r, problem.lambda};
    // only coordinate 2 carries a penalty term; h_2*(b_2-h_2) > 0 keeps it fixed
    auto g1 = subgradient_interval(input, 0.5);
    auto g2 = subgradient_interval(input, 2.5);
    CHECK(g1.lo == g1.hi);
    CHECK(g2.lo == g2.hi);
    double d_sq = 0.0, rh_d = 0.0;
    for (std::size_t j = 0; j < r_h.size(); ++j) {
        double d = r_h[j] - r[j];
        d_sq += d * d;
        rh_d += r_h[j] * d;
    }
    CHECK(g1.lo == doctest::Approx(0.5 * d_sq - rh_d + 0.4 * 0.6).epsilon(1e-12));
}

TEST_CASE("breakpoints enumerate exactly the sign-flip set") {
    Problem one(DesignMatrix(1, 1, {1.0}), {1.0}, 0.3);

    SUBCASE("zero history point has none") {
        Vector h = {0.0}, beta = {0.5};
        Vector r_h = residual(one, h), r = residual(one, beta);
        CHECK(breakpoints({h, beta, r_h, r, one.lambda}).empty());
    }

    SUBCASE("single flip at w = 1/2") {
        Vector h = {1.0}, beta = {-1.0};
        Vector r_h = residual(one, h), r = residual(one, beta);
        auto bps = breakpoints({h, beta, r_h, r, one.lambda});
        REQUIRE(bps.size() == 1);
        CHECK(bps[0].w == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(bps[0].jump == doctest::Approx(2.0 * 0.3 * 2.0).epsilon(1e-15));
    }

    SUBCASE("duplicate w values merge with summed jumps") {
        Problem two(DesignMatrix(1, 2, {1.0, -2.0}), {1.0}, 0.3);
        Vector h = {1.0, -2.0}, beta = {0.5, -1.0};
        Vector r_h = residual(two, h), r = residual(two, beta);
        auto bps = breakpoints({h, beta, r_h, r, two.lambda});
        REQUIRE(bps.size() == 1);
        CHECK(bps[0].w == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(bps[0].jump ==
              doctest::Approx(2.0 * 0.3 * (0.5 + 1.0)).epsilon(1e-15));
    }

    SUBCASE("ascending order on random instances") {
        for (std::uint64_t seed = 20; seed < 40; ++seed) {
            oracle::Instance inst = oracle::make_instance(seed, false);
            auto bps = breakpoints(as_input(inst));
            for (std::size_t i = 0; i < bps.size(); ++i) {
                CHECK(bps[i].w > 0.0);
                if (i) CHECK(bps[i].w > bps[i - 1].w);
            }
        }
    }
}

TEST_CASE("closed form for the smooth case") {
    Problem problem = fixtures::demo_problem(0.0);
    Vector h = {0.1, -0.2, 0.3, 0.0, 0.05};
    Vector r_h = residual(problem, h);

    SUBCASE("zero residual target gives alpha = 1") {
        // r = 0 means beta interpolates y exactly
        Vector zero_r(problem.n(), 0.0);
        Vector beta = h;  // coefficients irrelevant for the quotient
        RefinementInput input{h, beta, r_h, zero_r, 0.0};
        CHECK(alpha_closed_form(input) == doctest::Approx(1.0).epsilon(1e-14));
    }

    SUBCASE("halved residual gives alpha = 2") {
        Vector half(problem.n());
        for (std::size_t j = 0; j < half.size(); ++j) half[j] = 0.5 * r_h[j];
        RefinementInput input{h, h, r_h, half, 0.0};
        CHECK(alpha_closed_form(input) == doctest::Approx(2.0).epsilon(1e-14));
    }

    SUBCASE("degenerate residuals are rejected") {
        RefinementInput input{h, h, r_h, r_h, 0.0};
        CHECK_THROWS_AS(alpha_closed_form(input), degenerate_input_error);
    }

    SUBCASE("lambda must be zero") {
        Vector r(problem.n(), 0.0);
        RefinementInput input{h, h, r_h, r, 0.5};
        CHECK_THROWS_AS(alpha_closed_form(input), std::invalid_argument);
    }
}

TEST_CASE("one-variable line search lands at 1.6") {
    Problem problem(DesignMatrix(1, 1, {1.0}), {1.0}, 0.2);
    Vector h = {0.0}, beta = {0.5};
    Vector r_h = residual(problem, h), r = residual(problem, beta);
    RefinementInput input{h, beta, r_h, r, problem.lambda};

    double by_sort = alpha_by_sort(input);
    double by_bisection = alpha_by_bisection(input);
    CHECK(by_sort == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(std::abs(by_bisection - 1.6) <= 1e-10);

    // cross-check against the dense grid
    double grid = oracle::grid_argmin(problem, h, beta);
    CHECK(std::abs(by_sort - grid) <= 2e-5);
}

TEST_CASE("empty breakpoint set reduces to one linear piece") {
    Problem problem(DesignMatrix(2, 2, {1.0, 0.5, -0.3, 0.8}), {1.0, -0.5}, 0.15);
    Vector h = {0.0, 0.0};
    Vector beta = {0.4, -0.2};
    Vector r_h = residual(problem, h), r = residual(problem, beta);
    RefinementInput input{h, beta, r_h, r, problem.lambda};

    double d_sq = 0.0, rh_d = 0.0;
    for (std::size_t j = 0; j < r_h.size(); ++j) {
        double d = r_h[j] - r[j];
        d_sq += d * d;
        rh_d += r_h[j] * d;
    }
    double expected = (rh_d - 0.15 * (0.4 + 0.2)) / d_sq;
    CHECK(alpha_by_sort(input) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(alpha_by_bisection(input) - expected) <= 1e-10);
}

TEST_CASE("sort and bisection agree with each other and the grid") {
    int checked = 0;
    for (std::uint64_t seed = 1000; seed < 1060; ++seed) {
        oracle::Instance inst = oracle::make_instance(seed, false);
        RefinementInput input = as_input(inst);
        double by_sort = alpha_by_sort(input);
        double by_bisection = alpha_by_bisection(input);
        CHECK(std::abs(by_sort - by_bisection) <= 1e-10);

        auto cert = subgradient_interval(input, by_sort);
        double tol = 1e-9 * refine_scale(input);
        CHECK(cert.lo <= tol);
        CHECK(cert.hi >= -tol);

        if (inst.problem.p() <= 10) {
            double grid = oracle::grid_argmin(inst.problem, inst.h, inst.beta);
            CHECK(std::abs(by_sort - grid) <= 2e-5);
            ++checked;
        }
    }
    CHECK(checked > 10);
}

TEST_CASE("positive factor whenever the history point is worse") {
    for (std::uint64_t seed = 400; seed < 440; ++seed) {
        oracle::Instance inst = oracle::make_instance(seed, seed % 3 == 0);
        double g0 = objective(inst.problem, inst.h);
        double g1 = objective(inst.problem, inst.beta);
        REQUIRE(g1 < g0);
        double alpha = minimize_g(as_input(inst), RefineMethod::closed_form_auto);
        CHECK(alpha > 0.0);
    }
}

TEST_CASE("subgradient endpoints are nondecreasing in alpha") {
    for (std::uint64_t seed = 600; seed < 615; ++seed) {
        oracle::Instance inst = oracle::make_instance(seed, false);
        RefinementInput input = as_input(inst);
        double prev_lo = -1e300, prev_hi = -1e300;
        for (double alpha = 0.05; alpha < 8.0; alpha += 0.037) {
            auto [lo, hi] = subgradient_interval(input, alpha);
            CHECK(lo >= prev_lo - 1e-12);
            CHECK(hi >= prev_hi - 1e-12);
            prev_lo = lo;
            prev_hi = hi;
        }
    }
}

TEST_CASE("minimize_g dispatch and the optimal-ray recovery") {
    SUBCASE("lambda zero routes to the closed form") {
        oracle::Instance inst = oracle::make_instance(77, true);
        RefinementInput input = as_input(inst);
        CHECK(minimize_g(input, RefineMethod::sort) == alpha_closed_form(input));
        CHECK(minimize_g(input, RefineMethod::bisection) == alpha_closed_form(input));
    }

    SUBCASE("sort and bisection dispatch agree for positive lambda") {
        oracle::Instance inst = oracle::make_instance(78, false);
        RefinementInput input = as_input(inst);
        CHECK(std::abs(minimize_g(input, RefineMethod::sort) -
                       minimize_g(input, RefineMethod::bisection)) <= 1e-10);
    }

    SUBCASE("a minimizer on the ray is recovered exactly") {
        for (std::uint64_t seed = 50; seed < 60; ++seed) {
            auto [problem, h, beta, best] = oracle::ray_recovery_instance(seed);
            Vector r_h = residual(problem, h), r = residual(problem, beta);
            double alpha =
                minimize_g({h, beta, r_h, r, 0.0}, RefineMethod::closed_form_auto);
            Vector s = search_point(h, beta, alpha);
            CHECK(std::abs(objective(problem, s) - objective(problem, best)) <=
                  1e-10);
        }
    }
}

TEST_CASE("instrumented operation counts stay within their ceilings") {
    for (std::uint64_t seed = 900; seed < 930; ++seed) {
        oracle::Instance inst = oracle::make_instance(seed, false);
        RefinementInput input = as_input(inst);
        std::size_t m = breakpoints(input).size();

        refine_stats().reset();
        alpha_by_bisection(input);
        double log_m = std::log2(static_cast<double>(m) + 2.0);
        CHECK(refine_stats().subgradient_evals <=
              static_cast<std::uint64_t>(6.0 * log_m + 12.0));
        CHECK(refine_stats().breakpoint_touches <=
              static_cast<std::uint64_t>(24.0 * (static_cast<double>(m) + 8.0)));
    }
}
