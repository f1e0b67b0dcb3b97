#pragma once

#include <Eigen/Dense>

namespace esl::geometry {

/// Vertices of one simplex, one column per vertex (d x m, m >= 1).
using SimplexVertices = Eigen::MatrixXd;

/// Nearest point of a closed simplex to a query point.
struct Projection {
    Eigen::VectorXd barycentric;  // length m, >= 0, sums to 1
    Eigen::VectorXd point;        // length d
    double sq_error = 0.0;
};

/// Moore-Penrose pseudo-inverse via SVD. Singular values below
/// max(rows, cols) * eps * sigma_max are treated as zero.
/// Throws InvalidInput on non-finite entries.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m);

/// B(i, k) = |v_i - v_k|^2.
Eigen::MatrixXd pairwise_sq_distances(const SimplexVertices& vertices);

/// Content (length, area, volume, ...) of the simplex spanned by the columns
/// of `vertices`, from the Cayley-Menger determinant. A single vertex has
/// content 0; affinely dependent vertex sets have content 0 as well, since
/// negative radicands from rounding are clamped.
double simplex_content(const SimplexVertices& vertices);

/// Euclidean projection of `y` onto the convex hull of the columns of
/// `vertices`.
///
/// The point is first projected onto the affine hull. If every barycentric
/// coordinate is non-negative that is the answer; otherwise the optimum lies
/// on a facet opposite one of the negative-coordinate vertices, so each such
/// facet is solved recursively and the best result kept. Exact, but
/// exponential in the worst case, which is fine for the vertex counts
/// produced by evolution.
Projection project_onto_simplex(const Eigen::VectorXd& y, const SimplexVertices& vertices);

/// Shorthand for project_onto_simplex(y, vertices).sq_error.
double sq_distance_to_simplex(const Eigen::VectorXd& y, const SimplexVertices& vertices);

}  // namespace esl::geometry

#include <map>
#include <memory>
#include <vector>

namespace esl::geometry {

/// Projects many points onto one simplex. Factorisations of the faces visited
/// by the recursive search are cached, so encoding a whole dataset against a
/// simplex pays for each face solve once. Not thread-safe; use one projector
/// per thread.
class SimplexProjector {
public:
    explicit SimplexProjector(SimplexVertices vertices);

    Projection project(const Eigen::VectorXd& y) const;
    double sq_distance(const Eigen::VectorXd& y) const;

    const SimplexVertices& vertices() const { return vertices_; }

private:
    struct FaceSolver {
        std::vector<int> indices;
        Eigen::VectorXd origin;
        Eigen::MatrixXd edges;        // d x (k-1)
        Eigen::MatrixXd edges_pinv;   // (k-1) x d
    };
    struct Candidate {
        std::vector<int> indices;
        Eigen::VectorXd weights;  // over `indices`
        double sq_error;
    };

    const FaceSolver& face(const std::vector<int>& indices) const;
    Candidate solve(const Eigen::VectorXd& y, const std::vector<int>& indices,
                    std::vector<std::vector<int>>& visited) const;

    SimplexVertices vertices_;
    mutable std::map<std::vector<int>, std::unique_ptr<FaceSolver>> faces_;
};

}  // namespace esl::geometry
