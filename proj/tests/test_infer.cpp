#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "tspmdf/errors.hpp"
#include "tspmdf/infer.hpp"
#include "tspmdf/io.hpp"
#include "tspmdf/local_search.hpp"

using namespace tspmdf;

namespace {

ModelParams tiny_model(int digits, HeadKind head = HeadKind::kCategorical,
                       std::uint64_t seed = 7) {
    return init_model(6, 2, digits, head, seed);
}

SolveConfig tiny_config() {
    SolveConfig cfg;
    cfg.t_iters = 4;
    cfg.samples = 6;
    cfg.digits = 2;
    cfg.k = 8;
    cfg.threads = 2;
    return cfg;
}

}  // namespace

TEST_CASE("zero iterations reproduce the constructor exactly") {
    TspInstance inst = generate_uniform(40, 3);
    SolveConfig cfg = tiny_config();
    cfg.t_iters = 0;
    for (ConstructorKind kind : {ConstructorKind::kNearest, ConstructorKind::kFarthest}) {
        cfg.constructor = kind;
        SolveResult res = random_modifier_solve(inst, cfg);
        Tour direct = construct(kind, inst);
        CHECK(res.best_tour.perm == direct.perm);
        CHECK(res.best_length == tour_length(inst, direct));
        CHECK(res.base_length == res.best_length);
        REQUIRE(res.trace.size() == 1);
        CHECK(res.trace[0] == res.base_length);
        CHECK(std::isinf(res.best_excluding_base));

        ModelParams params = tiny_model(cfg.digits);
        SolveResult guided = mdf_solve(inst, params, cfg);
        CHECK(guided.best_tour.perm == direct.perm);
        CHECK(std::isinf(guided.best_excluding_base));
    }
}

TEST_CASE("the trace starts at the base length and never increases") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        TspInstance inst = generate_uniform(30, seed);
        SolveConfig cfg = tiny_config();
        cfg.seed = seed;
        ModelParams params = tiny_model(cfg.digits, HeadKind::kCategorical, seed);
        SolveResult res = mdf_solve(inst, params, cfg);
        REQUIRE(res.trace.size() == static_cast<std::size_t>(cfg.t_iters) + 1);
        CHECK(res.trace.front() == res.base_length);
        for (std::size_t i = 1; i < res.trace.size(); ++i)
            CHECK(res.trace[i] <= res.trace[i - 1]);
        CHECK(res.trace.back() == res.best_length);
    }
}

TEST_CASE("the result never loses to the plain constructor") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        TspInstance inst = generate_uniform(25, 100 + seed);
        SolveConfig cfg = tiny_config();
        cfg.seed = seed;
        SolveResult res = random_modifier_solve(inst, cfg);
        CHECK(res.best_length <= res.base_length);
        CHECK(is_permutation(res.best_tour, inst.node_count()));
        CHECK(res.best_length == doctest::Approx(tour_length(inst, res.best_tour)).epsilon(1e-12));
    }
}

TEST_CASE("best_excluding_base tracks modified candidates only") {
    TspInstance inst = generate_uniform(20, 17);
    SolveConfig cfg = tiny_config();
    SolveResult res = random_modifier_solve(inst, cfg);
    CHECK(std::isfinite(res.best_excluding_base));
    // modified-candidate tours are evaluated on the original instance, so the
    // overall best is the smaller of the base and the best exclusive value
    CHECK(res.best_length == doctest::Approx(std::min(res.base_length, res.best_excluding_base))
                                 .epsilon(1e-12));
}

TEST_CASE("solves are deterministic and thread-count independent") {
    TspInstance inst = generate_uniform(35, 23);
    SolveConfig cfg = tiny_config();
    cfg.seed = 9;

    SUBCASE("random modifier") {
        cfg.threads = 1;
        SolveResult a = random_modifier_solve(inst, cfg);
        cfg.threads = 4;
        SolveResult b = random_modifier_solve(inst, cfg);
        CHECK(a.best_tour.perm == b.best_tour.perm);
        CHECK(a.best_length == b.best_length);
        CHECK(a.best_excluding_base == b.best_excluding_base);
        CHECK(a.trace == b.trace);
    }

    SUBCASE("guided") {
        ModelParams params = tiny_model(cfg.digits);
        cfg.threads = 1;
        SolveResult a = mdf_solve(inst, params, cfg);
        cfg.threads = 4;
        SolveResult b = mdf_solve(inst, params, cfg);
        CHECK(a.best_tour.perm == b.best_tour.perm);
        CHECK(a.best_length == b.best_length);
        CHECK(a.trace == b.trace);
    }

    SUBCASE("different seeds explore differently") {
        SolveResult a = random_modifier_solve(inst, cfg);
        cfg.seed = 10;
        SolveResult b = random_modifier_solve(inst, cfg);
        CHECK(a.best_excluding_base != b.best_excluding_base);
    }
}

TEST_CASE("a gaussian-head model runs through the same pipeline") {
    TspInstance inst = generate_uniform(22, 31);
    SolveConfig cfg = tiny_config();
    ModelParams params = tiny_model(cfg.digits, HeadKind::kGaussian);
    SolveResult res = mdf_solve(inst, params, cfg);
    CHECK(res.best_length <= res.base_length);
    REQUIRE(res.trace.size() == static_cast<std::size_t>(cfg.t_iters) + 1);
    for (std::size_t i = 1; i < res.trace.size(); ++i) CHECK(res.trace[i] <= res.trace[i - 1]);
}

TEST_CASE("the model's M must match the requested digit count") {
    TspInstance inst = generate_uniform(12, 5);
    SolveConfig cfg = tiny_config();
    cfg.digits = 3;
    ModelParams params = tiny_model(2);
    CHECK_THROWS_AS(mdf_solve(inst, params, cfg), StructuralError);
}

TEST_CASE("degenerate configurations are rejected") {
    TspInstance inst = generate_uniform(12, 5);
    SolveConfig cfg = tiny_config();

    cfg.t_iters = -1;
    CHECK_THROWS_AS(random_modifier_solve(inst, cfg), DomainError);

    cfg = tiny_config();
    cfg.samples = 0;
    CHECK_THROWS_AS(random_modifier_solve(inst, cfg), DomainError);

    cfg = tiny_config();
    cfg.digits = 0;
    CHECK_THROWS_AS(random_modifier_solve(inst, cfg), DomainError);
}

TEST_CASE("optional 2-opt refines only the final tour") {
    TspInstance inst = generate_uniform(40, 41);
    SolveConfig cfg = tiny_config();
    SolveResult plain = random_modifier_solve(inst, cfg);
    cfg.run_two_opt = true;
    SolveResult refined = random_modifier_solve(inst, cfg);

    CHECK(refined.best_length <= plain.best_length);
    CHECK(refined.trace == plain.trace);  // the trace is pre-refinement
    CHECK(refined.best_length == doctest::Approx(tour_length(inst, refined.best_tour)));

    Tour again = two_opt(inst, refined.best_tour);
    CHECK(tour_length(inst, again) == doctest::Approx(refined.best_length).epsilon(1e-12));
}
