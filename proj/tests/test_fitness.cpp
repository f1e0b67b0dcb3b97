#include <doctest.h>

#include <cmath>

#include "esl/error.hpp"
#include "esl/fitness.hpp"

using namespace esl;
using doctest::Approx;

namespace {

Simplicial segment_plus_point() {
    Eigen::MatrixXd v(1, 3);
    v << 0, 1, 5;
    return Simplicial(v, Hypergraph({{0, 1}, {2}}, 3));
}

Simplicial unit_triangle() {
    Eigen::MatrixXd v(2, 3);
    v << 0, 1, 0,
         0, 0, 1;
    return Simplicial(v, Hypergraph({{0, 1, 2}}, 3));
}

}  // namespace

TEST_CASE("cumulative_content") {
    CHECK(cumulative_content(Simplicial::point(Eigen::Vector2d(3, 3))) == 1.0);
    CHECK(cumulative_content(segment_plus_point()) == Approx(5.0).epsilon(1e-12));
    CHECK(cumulative_content(unit_triangle()) == Approx(std::pow(1.5, 3)).epsilon(1e-12));
}

TEST_CASE("fitness_max examples") {
    const Simplicial p = Simplicial::point(Eigen::Vector2d(0, 0));
    FitnessConfig cfg;
    cfg.beta = 0.0;
    CHECK(fitness_max(1.0, p, 100, cfg) == Approx(2.0).epsilon(1e-12));

    // gamma + cumulative content = 99 + 1 = 100.
    cfg.beta = 0.05;
    cfg.gamma = 99.0;
    CHECK(fitness_max(1.0, p, 100, cfg) == Approx(2.0 / 1.1).epsilon(1e-12));

    CHECK(fitness_max(100.0, p, 100, FitnessConfig{}) == 0.0);
    CHECK(fitness_max(200.0, p, 100, FitnessConfig{}) < 0.0);
}

TEST_CASE("fitness_max floors the SSE") {
    const Simplicial p = Simplicial::point(Eigen::Vector2d(0, 0));
    FitnessConfig cfg;
    cfg.beta = 0.0;
    CHECK(std::isfinite(fitness_max(0.0, p, 10, cfg)));
    CHECK(fitness_max(0.0, p, 10, cfg) == Approx(13.0).epsilon(1e-12));
}

TEST_CASE("fitness_max prefers compact models at equal SSE") {
    FitnessConfig cfg;
    const double compact = fitness_max(1.0, Simplicial::point(Eigen::Vector2d(0, 0)), 100, cfg);
    const double bulky = fitness_max(1.0, unit_triangle(), 100, cfg);
    CHECK(compact > bulky);
}

TEST_CASE("fitness_min examples") {
    FitnessConfig cfg;
    CHECK(fitness_min(0.0, Simplicial::point(Eigen::Vector2d(0, 0)), cfg) == 1.0);
    cfg.alpha = 0.0;
    CHECK(fitness_min(3.25, segment_plus_point(), cfg) == 3.25);
    cfg.alpha = 2.0;
    CHECK(fitness_min(2.5, segment_plus_point(), cfg) == Approx(12.5).epsilon(1e-12));
}

TEST_CASE("FitnessConfig validation") {
    FitnessConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.beta = -1.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidInput);
    cfg = FitnessConfig{};
    cfg.gamma = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidInput);
}
