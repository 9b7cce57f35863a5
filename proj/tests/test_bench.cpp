#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fixtures.hpp"
#include "srrlasso/bench.hpp"
#include "srrlasso/io.hpp"

using namespace srrlasso;

TEST_CASE("lambda from ratio") {
    DesignMatrix X = fixtures::demo_matrix();
    Vector y(fixtures::kY.begin(), fixtures::kY.end());

    CHECK(lambda_from_ratio(X, y, 0.0) == 0.0);

    // oracle: dense transpose-multiply spelled out by hand
    double max_corr = 0.0;
    for (std::size_t i = 0; i < X.cols(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < X.rows(); ++j) acc += X.col(i)[j] * y[j];
        max_corr = std::max(max_corr, std::abs(acc));
    }
    CHECK(lambda_from_ratio(X, y, 0.5) ==
          doctest::Approx(0.5 * max_corr).epsilon(1e-15));

    // at r = 1 the first sweep stays entirely inside the dead zone
    Problem problem(X, y, lambda_from_ratio(X, y, 1.0));
    auto [beta1, r1] = cd_sweep(problem, Vector(5, 0.0), problem.y);
    for (double v : beta1) CHECK(v == 0.0);

    CHECK_THROWS_AS(lambda_from_ratio(X, y, -0.5), std::invalid_argument);
}

TEST_CASE("bench protocol on a fixed problem") {
    Problem problem = fixtures::demo_problem(0.0);
    BenchProtocol protocol;
    protocol.ratios = {0.5, 0.01};
    protocol.cd_step_tol = 1e-6;
    protocol.max_sweeps = 20000;

    BenchTable table = run_bench(problem, protocol);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.repeats == 1);
    CHECK_FALSE(table.synthetic);

    for (const BenchRow& row : table.rows) {
        REQUIRE(row.cells.size() == 3);
        const BenchCell& cd = row.cells[0];
        REQUIRE(cd.variant == Variant::cd);
        CHECK(cd.all_converged());
        for (std::size_t vi = 1; vi < row.cells.size(); ++vi) {
            const BenchCell& srr = row.cells[vi];
            CHECK(srr.all_converged());
            // the target is the cd objective, so the final value cannot exceed it
            for (std::size_t run = 0; run < srr.runs.size(); ++run)
                CHECK(srr.runs[run].final_objective <=
                      cd.runs[run].final_objective);
        }
    }
}

TEST_CASE("synthetic bench is deterministic and keyed by seed") {
    BenchProtocol protocol;
    protocol.ratios = {0.5, 0.1};
    protocol.repeats = 3;
    protocol.base_seed = 11;
    protocol.max_sweeps = 50000;
    protocol.jobs = 2;

    BenchTable a = run_bench_synthetic(40, 25, protocol);
    protocol.jobs = 1;
    BenchTable b = run_bench_synthetic(40, 25, protocol);
    CHECK(render_csv(a) == render_csv(b));

    REQUIRE(a.rows.size() == 2);
    for (const BenchRow& row : a.rows) {
        for (const BenchCell& cell : row.cells) {
            REQUIRE(cell.runs.size() == 3);
            for (std::size_t run = 0; run < 3; ++run)
                CHECK(cell.runs[run].seed == 11 + run);
        }
    }

    std::string human = render_table(a);
    CHECK(human.find("seeds=11..13") != std::string::npos);
    CHECK(human.find("srrc") != std::string::npos);
}

TEST_CASE("protocol validation") {
    Problem problem = fixtures::demo_problem(0.0);
    BenchProtocol bad;
    bad.ratios = {1.5};
    CHECK_THROWS_AS(run_bench(problem, bad), std::invalid_argument);

    BenchProtocol no_cd;
    no_cd.variants = {Variant::srrc};
    CHECK_THROWS_AS(run_bench(problem, no_cd), std::invalid_argument);

    BenchProtocol zero_rep;
    zero_rep.repeats = 0;
    CHECK_THROWS_AS(run_bench_synthetic(5, 4, zero_rep), std::invalid_argument);
}
