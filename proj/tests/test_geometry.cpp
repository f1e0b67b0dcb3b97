#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "esl/error.hpp"
#include "esl/geometry.hpp"
#include "oracles.hpp"

using namespace esl::geometry;
using doctest::Approx;

namespace {

Eigen::MatrixXd cols(std::initializer_list<std::initializer_list<double>> points) {
    const auto m = static_cast<Eigen::Index>(points.size());
    const auto d = static_cast<Eigen::Index>(points.begin()->size());
    Eigen::MatrixXd out(d, m);
    Eigen::Index j = 0;
    for (const auto& p : points) {
        Eigen::Index i = 0;
        for (double x : p) out(i++, j) = x;
        ++j;
    }
    return out;
}

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

}  // namespace

TEST_CASE("pseudo_inverse of identity and zero") {
    CHECK(pseudo_inverse(Eigen::Matrix3d::Identity()).isApprox(Eigen::MatrixXd::Identity(3, 3)));
    const Eigen::MatrixXd z = pseudo_inverse(Eigen::MatrixXd::Zero(2, 3));
    CHECK(z.rows() == 3);
    CHECK(z.cols() == 2);
    CHECK(z.isZero(0.0));
}

TEST_CASE("pseudo_inverse satisfies the Moore-Penrose identities") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd m = oracle::random_matrix(5, 3, rng);
        const Eigen::MatrixXd p = pseudo_inverse(m);
        CHECK((p * m - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-8);
        CHECK((m * p * m - m).norm() < 1e-8);
        CHECK((p * m * p - p).norm() < 1e-8);
        CHECK(((m * p).transpose() - m * p).norm() < 1e-8);
        CHECK(((p * m).transpose() - p * m).norm() < 1e-8);
    }
    // Rank-deficient: 4x4 of rank 2.
    const Eigen::MatrixXd a = oracle::random_matrix(4, 2, rng);
    const Eigen::MatrixXd m = a * a.transpose();
    const Eigen::MatrixXd p = pseudo_inverse(m);
    CHECK((m * p * m - m).norm() < 1e-8);
    CHECK((p * m * p - p).norm() < 1e-8);
}

TEST_CASE("pseudo_inverse rejects non-finite input") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
    m(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(pseudo_inverse(m), esl::InvalidInput);
}

TEST_CASE("pairwise_sq_distances") {
    CHECK(pairwise_sq_distances(cols({{0}, {1}})) == cols({{0, 1}, {1, 0}}));
    CHECK(pairwise_sq_distances(cols({{2, 2}, {2, 2}, {2, 2}})).isZero(0.0));
    CHECK(pairwise_sq_distances(cols({{0, 0}, {3, 0}, {0, 4}})) == cols({{0, 9, 16}, {9, 0, 25}, {16, 25, 0}}));
}

TEST_CASE("simplex_content closed forms") {
    CHECK(simplex_content(cols({{0}, {1}})) == Approx(1.0).epsilon(1e-12));
    CHECK(simplex_content(cols({{0, 0}, {1, 0}, {0, 1}})) == Approx(0.5).epsilon(1e-12));
    // Regular tetrahedron with unit edges.
    const Eigen::MatrixXd reg = cols({{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0},
                                      {0.5, std::sqrt(3.0) / 6, std::sqrt(2.0 / 3.0)}});
    CHECK(simplex_content(reg) == Approx(1.0 / (6.0 * std::sqrt(2.0))).epsilon(1e-12));
    CHECK(simplex_content(cols({{3, 4}})) == 0.0);
}

TEST_CASE("simplex_content of degenerate simplices is zero") {
    CHECK(simplex_content(cols({{0, 0}, {1, 1}, {2, 2}})) < 1e-9);
    CHECK(simplex_content(cols({{1, 1}, {1, 1}})) == 0.0);
    // Four points in a plane embedded in 3-D.
    CHECK(simplex_content(cols({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}})) < 1e-9);
}

TEST_CASE("simplex_content agrees with the Gram determinant and is invariant under rigid motion") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 2 + trial % 4;
        const int d = m + trial % 3;
        const Eigen::MatrixXd v = oracle::random_matrix(d, m, rng);
        const double c = simplex_content(v);
        CHECK(c == Approx(oracle::gram_content(v)).epsilon(1e-8));

        const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(oracle::random_matrix(d, d, rng)).householderQ();
        const Eigen::VectorXd shift = oracle::random_matrix(d, 1, rng);
        const Eigen::MatrixXd moved = (q * v).colwise() + shift;
        CHECK(simplex_content(moved) == Approx(c).epsilon(1e-8));
        // Content scales with the (m-1)-th power of a uniform scaling.
        CHECK(simplex_content(2.0 * v) == Approx(c * std::pow(2.0, m - 1)).epsilon(1e-8));
    }
}

TEST_CASE("project_onto_simplex examples") {
    SUBCASE("point on a segment") {
        const Projection p = project_onto_simplex(vec({0.25, 0.25}), cols({{0, 0}, {1, 1}}));
        CHECK(p.barycentric(0) == Approx(0.75));
        CHECK(p.barycentric(1) == Approx(0.25));
        CHECK(p.point.isApprox(vec({0.25, 0.25})));
        CHECK(p.sq_error == Approx(0.0).scale(1.0));
    }
    SUBCASE("clipped to an endpoint") {
        const Projection p = project_onto_simplex(vec({2, 2}), cols({{0, 0}, {1, 1}}));
        CHECK(p.barycentric(0) == 0.0);
        CHECK(p.barycentric(1) == 1.0);
        CHECK(p.point.isApprox(vec({1, 1})));
        CHECK(p.sq_error == Approx(2.0));
    }
    SUBCASE("foot on the hypotenuse") {
        const Projection p = project_onto_simplex(vec({1, 1}), cols({{0, 0}, {1, 0}, {0, 1}}));
        CHECK(p.point.isApprox(vec({0.5, 0.5})));
        CHECK(p.barycentric(0) == Approx(0.0).scale(1.0));
        CHECK(p.barycentric(1) == Approx(0.5));
        CHECK(p.barycentric(2) == Approx(0.5));
        CHECK(p.sq_error == Approx(0.5));
    }
    SUBCASE("3-D triangle against the grid oracle") {
        const Eigen::VectorXd y = vec({0.9, -0.3, 0.5});
        const Eigen::MatrixXd v = cols({{0, 0, 0}, {1, 0, 0}, {0, 1, 1}});
        Eigen::VectorXd t;
        const double best = oracle::grid_sq_distance(y, v, 1e-3, &t);
        const Projection p = project_onto_simplex(y, v);
        CHECK(p.sq_error <= best + 1e-12);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(p.barycentric(i) - t(i)) <= 2e-3);
    }
    SUBCASE("single vertex") {
        const Projection p = project_onto_simplex(vec({3, 4}), cols({{0, 0}}));
        CHECK(p.barycentric.size() == 1);
        CHECK(p.barycentric(0) == 1.0);
        CHECK(p.sq_error == 25.0);
    }
}

TEST_CASE("project_onto_simplex rejects a dimension mismatch") {
    CHECK_THROWS_AS(project_onto_simplex(vec({1, 2, 3}), cols({{0, 0}, {1, 1}})), esl::InvalidInput);
}

TEST_CASE("projection output is a valid barycentric combination") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 1 + trial % 7;
        const int d = 1 + trial % 9;
        const Eigen::MatrixXd v = oracle::random_matrix(d, m, rng);
        const Eigen::VectorXd y = oracle::random_matrix(d, 1, rng, 2.0);
        const Projection p = project_onto_simplex(y, v);
        REQUIRE(p.barycentric.size() == m);
        CHECK(p.barycentric.minCoeff() >= 0.0);
        CHECK(p.barycentric.sum() == Approx(1.0).epsilon(1e-12));
        CHECK((v * p.barycentric - p.point).norm() < 1e-9);
        CHECK(p.sq_error == Approx((y - p.point).squaredNorm()).epsilon(1e-9).scale(1.0));
        // Optimality over the convex hull, including affinely dependent vertex sets.
        CHECK(oracle::max_kkt_violation(y, p.point, v) < 1e-8);
    }
}

TEST_CASE("projection matches the grid oracle on segments and triangles") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const int m = 2 + trial % 2;
        const int d = 2 + trial % 4;
        const Eigen::MatrixXd v = oracle::random_matrix(d, m, rng);
        const Eigen::VectorXd y = oracle::random_matrix(d, 1, rng, 1.5);
        const double best = oracle::grid_sq_distance(y, v, 1e-3);
        const double got = sq_distance_to_simplex(y, v);
        CHECK(got <= best + 1e-6);
        CHECK(got >= best - 0.05 * std::max(1.0, best));
    }
}

TEST_CASE("projection is idempotent and equivariant") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 1 + trial % 5;
        const int d = 2 + trial % 4;
        const Eigen::MatrixXd v = oracle::random_matrix(d, m, rng);
        const Eigen::VectorXd y = oracle::random_matrix(d, 1, rng, 2.0);
        const Projection p = project_onto_simplex(y, v);
        const Projection again = project_onto_simplex(p.point, v);
        CHECK((again.point - p.point).norm() < 1e-9);
        CHECK(again.sq_error < 1e-16 + 1e-12 * p.point.squaredNorm());

        const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(oracle::random_matrix(d, d, rng)).householderQ();
        const Eigen::VectorXd shift = oracle::random_matrix(d, 1, rng);
        const double scale = 3.0;
        const Projection moved = project_onto_simplex(scale * (q * y) + shift, (scale * (q * v)).colwise() + shift);
        CHECK(moved.sq_error == Approx(scale * scale * p.sq_error).epsilon(1e-8).scale(1.0));
        CHECK((moved.point - (scale * (q * p.point) + shift)).norm() < 1e-8);
    }
}

TEST_CASE("SimplexProjector matches the free function") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 1 + trial % 6;
        const int d = 3;
        const Eigen::MatrixXd v = oracle::random_matrix(d, m, rng);
        const SimplexProjector proj(v);
        CHECK(proj.vertices() == v);
        for (int k = 0; k < 10; ++k) {
            const Eigen::VectorXd y = oracle::random_matrix(d, 1, rng, 2.0);
            const Projection a = proj.project(y);
            const Projection b = project_onto_simplex(y, v);
            CHECK(a.sq_error == Approx(b.sq_error).epsilon(1e-12).scale(1.0));
            CHECK(proj.sq_distance(y) == Approx(b.sq_error).epsilon(1e-12).scale(1.0));
        }
    }
}
