#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace esl {

/// A sorted, duplicate-free list of vertex indices naming one simplex.
using Hyperedge = std::vector<int>;

/// Set of hyperedges over `vertex_count` vertices. Hyperedges are stored
/// sorted so that set equality is plain vector equality.
class Hypergraph {
public:
    Hypergraph() = default;
    /// Sorts each hyperedge and validates. Throws InvalidInput on any violation.
    Hypergraph(std::vector<Hyperedge> hyperedges, int vertex_count);

    const std::vector<Hyperedge>& hyperedges() const { return hyperedges_; }
    int vertex_count() const { return vertex_count_; }
    std::size_t size() const { return hyperedges_.size(); }
    const Hyperedge& operator[](std::size_t j) const { return hyperedges_[j]; }

    bool operator==(const Hypergraph&) const = default;

private:
    std::vector<Hyperedge> hyperedges_;
    int vertex_count_ = 0;
};

/// Vertex positions (d x V, one column per vertex) plus the hypergraph that
/// groups them into simplices.
class Simplicial {
public:
    Simplicial() = default;
    /// Throws InvalidInput if the vertex count disagrees with the hypergraph
    /// or any coordinate is non-finite.
    Simplicial(Eigen::MatrixXd vertices, Hypergraph hypergraph);

    /// A single 0-simplex at `point`.
    static Simplicial point(const Eigen::VectorXd& point);

    const Eigen::MatrixXd& vertices() const { return vertices_; }
    const Hypergraph& hypergraph() const { return hypergraph_; }
    Eigen::Index dim() const { return vertices_.rows(); }
    int vertex_count() const { return static_cast<int>(vertices_.cols()); }
    std::size_t simplex_count() const { return hypergraph_.size(); }

    /// Vertex columns of simplex `j`, in hyperedge order.
    Eigen::MatrixXd simplex(std::size_t j) const;

    bool operator==(const Simplicial& other) const {
        return hypergraph_ == other.hypergraph_ && vertices_.rows() == other.vertices_.rows() &&
               vertices_.cols() == other.vertices_.cols() && vertices_ == other.vertices_;
    }

private:
    Eigen::MatrixXd vertices_;
    Hypergraph hypergraph_;
};

/// Code of one data point: barycentric weights over its active hyperedge.
struct PointCode {
    std::size_t active_edge = 0;
    Eigen::VectorXd coefficients;
    double sq_error = 0.0;
};

using SparseCodes = std::vector<PointCode>;

/// Samples in columns (d x n) with optional integer labels.
struct Dataset {
    Eigen::MatrixXd points;
    std::optional<std::vector<int>> labels;

    Dataset() = default;
    explicit Dataset(Eigen::MatrixXd pts, std::optional<std::vector<int>> lbls = std::nullopt);

    Eigen::Index dim() const { return points.rows(); }
    Eigen::Index size() const { return points.cols(); }
    bool has_labels() const { return labels.has_value(); }

    /// Columns `indices`, labels carried along.
    Dataset subset(const std::vector<Eigen::Index>& indices) const;
};

struct Encoding {
    SparseCodes codes;
    double total_sse = 0.0;
};

/// Projects every point onto every simplex and keeps the closest (lowest
/// hyperedge index on ties).
Encoding encode(const Dataset& data, const Simplicial& s);

/// Dense V x n code matrix implied by `codes`.
Eigen::MatrixXd code_matrix(const SparseCodes& codes, const Simplicial& s);

/// Least-squares vertex update A = Y X^+ for fixed codes. Vertices that no
/// point uses keep their previous position.
Simplicial update_vertices(const Dataset& data, const SparseCodes& codes, const Simplicial& s);

/// Squared distance from `y` to the nearest simplex of `s`.
double reconstruction_error(const Eigen::VectorXd& y, const Simplicial& s);

}  // namespace esl
