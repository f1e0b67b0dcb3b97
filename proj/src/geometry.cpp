#include "esl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "esl/error.hpp"

namespace esl::geometry {

namespace {

// Relative singular-value cutoff for affine-hull solves.
constexpr double kAffineCutoff = 1e-10;
constexpr double kNegativeSlack = 1e-12;

void require_vertices(const SimplexVertices& vertices) {
    if (vertices.cols() < 1) throw InvalidInput("simplex needs at least one vertex");
    if (!vertices.allFinite()) throw InvalidInput("simplex vertices must be finite");
}

// Clamp tiny negatives, renormalise to sum 1.
void clean_barycentric(Eigen::VectorXd& t) {
    t = t.cwiseMax(0.0).cwiseMin(1.0);
    const double sum = t.sum();
    if (sum > 0.0) {
        t /= sum;
    } else {
        t.setZero();
        t(0) = 1.0;
    }
}

}  // namespace

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m) {
    if (!m.allFinite()) throw InvalidInput("pseudo_inverse: matrix has non-finite entries");
    if (m.size() == 0) return Eigen::MatrixXd::Zero(m.cols(), m.rows());

    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    const double cutoff = static_cast<double>(std::max(m.rows(), m.cols())) *
                          std::numeric_limits<double>::epsilon() * sigma(0);

    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sigma.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > cutoff) inv(i) = 1.0 / sigma(i);
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd pairwise_sq_distances(const SimplexVertices& vertices) {
    require_vertices(vertices);
    const Eigen::Index m = vertices.cols();
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index k = i + 1; k < m; ++k) {
            const double d2 = (vertices.col(i) - vertices.col(k)).squaredNorm();
            b(i, k) = d2;
            b(k, i) = d2;
        }
    }
    return b;
}

double simplex_content(const SimplexVertices& vertices) {
    require_vertices(vertices);
    const Eigen::Index m = vertices.cols();
    if (m == 1) return 0.0;

    const Eigen::MatrixXd b = pairwise_sq_distances(vertices);
    Eigen::MatrixXd bordered = Eigen::MatrixXd::Ones(m + 1, m + 1);
    bordered(0, 0) = 0.0;
    bordered.bottomRightCorner(m, m) = b;

    const int q = static_cast<int>(m) - 1;
    double factorial = 1.0;
    for (int i = 2; i <= q; ++i) factorial *= i;
    const double sign = ((q + 1) % 2 == 0) ? 1.0 : -1.0;
    const double scale = sign / (std::ldexp(1.0, q) * factorial * factorial);

    const double det = bordered.fullPivLu().determinant();
    const double radicand = scale * det;
    if (!(radicand > 0.0)) return 0.0;
    return std::sqrt(radicand);
}

SimplexProjector::SimplexProjector(SimplexVertices vertices) : vertices_(std::move(vertices)) {
    require_vertices(vertices_);
}

const SimplexProjector::FaceSolver& SimplexProjector::face(const std::vector<int>& indices) const {
    auto it = faces_.find(indices);
    if (it != faces_.end()) return *it->second;

    auto solver = std::make_unique<FaceSolver>();
    solver->indices = indices;
    solver->origin = vertices_.col(indices.front());
    const auto k = static_cast<Eigen::Index>(indices.size());
    solver->edges.resize(vertices_.rows(), k - 1);
    for (Eigen::Index j = 1; j < k; ++j) {
        solver->edges.col(j - 1) = vertices_.col(indices[static_cast<std::size_t>(j)]) - solver->origin;
    }
    if (k > 1) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(solver->edges, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd& sigma = svd.singularValues();
        Eigen::VectorXd inv = Eigen::VectorXd::Zero(sigma.size());
        const double cutoff = kAffineCutoff * (sigma.size() > 0 ? sigma(0) : 0.0);
        for (Eigen::Index i = 0; i < sigma.size(); ++i) {
            if (sigma(i) > cutoff && sigma(i) > 0.0) inv(i) = 1.0 / sigma(i);
        }
        solver->edges_pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
    }
    const FaceSolver& ref = *solver;
    faces_.emplace(indices, std::move(solver));
    return ref;
}

SimplexProjector::Candidate SimplexProjector::solve(const Eigen::VectorXd& y,
                                                    const std::vector<int>& indices,
                                                    std::vector<std::vector<int>>& visited) const {
    const auto k = static_cast<Eigen::Index>(indices.size());
    if (k == 1) {
        Candidate c{indices, Eigen::VectorXd::Ones(1),
                    (y - vertices_.col(indices.front())).squaredNorm()};
        return c;
    }

    const FaceSolver& f = face(indices);
    const Eigen::VectorXd offset = y - f.origin;
    const Eigen::VectorXd s = f.edges_pinv * offset;
    Eigen::VectorXd t(k);
    t(0) = 1.0 - s.sum();
    t.tail(k - 1) = s;

    if (t.minCoeff() >= -kNegativeSlack) {
        return Candidate{indices, t, (offset - f.edges * s).squaredNorm()};
    }

    // The optimum has zero weight on at least one negative-coordinate vertex.
    Candidate best{{}, {}, std::numeric_limits<double>::infinity()};
    for (Eigen::Index i = 0; i < k; ++i) {
        if (t(i) >= -kNegativeSlack) continue;
        std::vector<int> sub;
        sub.reserve(indices.size() - 1);
        for (Eigen::Index j = 0; j < k; ++j) {
            if (j != i) sub.push_back(indices[static_cast<std::size_t>(j)]);
        }
        if (std::find(visited.begin(), visited.end(), sub) != visited.end()) continue;
        visited.push_back(sub);
        Candidate c = solve(y, sub, visited);
        if (c.sq_error < best.sq_error) best = std::move(c);
    }
    return best;
}

Projection SimplexProjector::project(const Eigen::VectorXd& y) const {
    if (y.size() != vertices_.rows()) {
        throw InvalidInput("project_onto_simplex: point dimension " + std::to_string(y.size()) +
                           " does not match vertex dimension " + std::to_string(vertices_.rows()));
    }
    const auto m = vertices_.cols();
    Projection out;
    out.barycentric = Eigen::VectorXd::Zero(m);

    if (m == 1) {
        out.barycentric(0) = 1.0;
    } else if (m == 2) {
        const Eigen::VectorXd u = vertices_.col(1) - vertices_.col(0);
        const double len2 = u.squaredNorm();
        double s = len2 > 0.0 ? u.dot(y - vertices_.col(0)) / len2 : 0.0;
        s = std::clamp(s, 0.0, 1.0);
        out.barycentric << 1.0 - s, s;
    } else {
        std::vector<int> all(static_cast<std::size_t>(m));
        std::iota(all.begin(), all.end(), 0);
        std::vector<std::vector<int>> visited;
        const Candidate best = solve(y, all, visited);
        for (std::size_t j = 0; j < best.indices.size(); ++j) {
            out.barycentric(best.indices[j]) = best.weights(static_cast<Eigen::Index>(j));
        }
    }
    clean_barycentric(out.barycentric);
    out.point = vertices_ * out.barycentric;
    out.sq_error = (y - out.point).squaredNorm();
    return out;
}

double SimplexProjector::sq_distance(const Eigen::VectorXd& y) const {
    return project(y).sq_error;
}

Projection project_onto_simplex(const Eigen::VectorXd& y, const SimplexVertices& vertices) {
    return SimplexProjector(vertices).project(y);
}

double sq_distance_to_simplex(const Eigen::VectorXd& y, const SimplexVertices& vertices) {
    return SimplexProjector(vertices).sq_distance(y);
}

}  // namespace esl::geometry
