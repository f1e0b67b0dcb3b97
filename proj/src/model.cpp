#include "esl/model.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>

#include "esl/error.hpp"
#include "esl/geometry.hpp"

namespace esl {

Hypergraph::Hypergraph(std::vector<Hyperedge> hyperedges, int vertex_count)
    : hyperedges_(std::move(hyperedges)), vertex_count_(vertex_count) {
    if (vertex_count_ < 1) throw InvalidInput("hypergraph needs a positive vertex count");
    if (hyperedges_.empty()) throw InvalidInput("hypergraph needs at least one hyperedge");
    std::set<Hyperedge> seen;
    for (std::size_t j = 0; j < hyperedges_.size(); ++j) {
        auto& h = hyperedges_[j];
        if (h.empty()) throw InvalidInput("hyperedge " + std::to_string(j) + " is empty");
        std::sort(h.begin(), h.end());
        if (std::adjacent_find(h.begin(), h.end()) != h.end()) {
            throw InvalidInput("hyperedge " + std::to_string(j) + " repeats a vertex");
        }
        if (h.front() < 0 || h.back() >= vertex_count_) {
            throw InvalidInput("hyperedge " + std::to_string(j) + " references a vertex outside [0, " +
                               std::to_string(vertex_count_) + ")");
        }
        if (!seen.insert(h).second) {
            throw InvalidInput("hyperedge " + std::to_string(j) + " duplicates an earlier hyperedge");
        }
    }
}

Simplicial::Simplicial(Eigen::MatrixXd vertices, Hypergraph hypergraph)
    : vertices_(std::move(vertices)), hypergraph_(std::move(hypergraph)) {
    if (vertices_.cols() != hypergraph_.vertex_count()) {
        throw InvalidInput("simplicial has " + std::to_string(vertices_.cols()) +
                           " vertices but hypergraph expects " + std::to_string(hypergraph_.vertex_count()));
    }
    if (hypergraph_.size() == 0) throw InvalidInput("simplicial needs at least one simplex");
    if (!vertices_.allFinite()) throw InvalidInput("simplicial vertices must be finite");
}

Simplicial Simplicial::point(const Eigen::VectorXd& point) {
    return Simplicial(Eigen::MatrixXd(point), Hypergraph({{0}}, 1));
}

Eigen::MatrixXd Simplicial::simplex(std::size_t j) const {
    const Hyperedge& h = hypergraph_[j];
    Eigen::MatrixXd out(vertices_.rows(), static_cast<Eigen::Index>(h.size()));
    for (std::size_t k = 0; k < h.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = vertices_.col(h[k]);
    return out;
}

Dataset::Dataset(Eigen::MatrixXd pts, std::optional<std::vector<int>> lbls)
    : points(std::move(pts)), labels(std::move(lbls)) {
    if (points.cols() < 1) throw InvalidInput("dataset needs at least one sample");
    if (!points.allFinite()) throw InvalidInput("dataset entries must be finite");
    if (labels && static_cast<Eigen::Index>(labels->size()) != points.cols()) {
        throw InvalidInput("dataset has " + std::to_string(points.cols()) + " samples but " +
                           std::to_string(labels->size()) + " labels");
    }
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& indices) const {
    Dataset out;
    out.points.resize(points.rows(), static_cast<Eigen::Index>(indices.size()));
    if (labels) out.labels.emplace();
    for (std::size_t k = 0; k < indices.size(); ++k) {
        out.points.col(static_cast<Eigen::Index>(k)) = points.col(indices[k]);
        if (labels) out.labels->push_back((*labels)[static_cast<std::size_t>(indices[k])]);
    }
    return out;
}

namespace {

void require_same_dim(Eigen::Index data_dim, const Simplicial& s, const char* op) {
    if (data_dim != s.dim()) {
        throw InvalidInput(std::string(op) + ": data dimension " + std::to_string(data_dim) +
                           " does not match simplicial dimension " + std::to_string(s.dim()));
    }
}

std::vector<geometry::SimplexProjector> projectors(const Simplicial& s) {
    std::vector<geometry::SimplexProjector> out;
    out.reserve(s.simplex_count());
    for (std::size_t j = 0; j < s.simplex_count(); ++j) out.emplace_back(s.simplex(j));
    return out;
}

}  // namespace

Encoding encode(const Dataset& data, const Simplicial& s) {
    require_same_dim(data.dim(), s, "encode");
    const auto proj = projectors(s);
    Encoding out;
    out.codes.resize(static_cast<std::size_t>(data.size()));
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        const Eigen::VectorXd y = data.points.col(i);
        PointCode& code = out.codes[static_cast<std::size_t>(i)];
        code.sq_error = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < proj.size(); ++j) {
            geometry::Projection p = proj[j].project(y);
            if (p.sq_error < code.sq_error) {
                code.active_edge = j;
                code.coefficients = std::move(p.barycentric);
                code.sq_error = p.sq_error;
            }
        }
        out.total_sse += code.sq_error;
    }
    return out;
}

Eigen::MatrixXd code_matrix(const SparseCodes& codes, const Simplicial& s) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(s.vertex_count(), static_cast<Eigen::Index>(codes.size()));
    for (std::size_t i = 0; i < codes.size(); ++i) {
        const PointCode& c = codes[i];
        if (c.active_edge >= s.simplex_count()) throw InvalidInput("code references a missing hyperedge");
        const Hyperedge& h = s.hypergraph()[c.active_edge];
        if (static_cast<std::size_t>(c.coefficients.size()) != h.size()) {
            throw InvalidInput("code length does not match its hyperedge");
        }
        for (std::size_t k = 0; k < h.size(); ++k) {
            x(h[k], static_cast<Eigen::Index>(i)) = c.coefficients(static_cast<Eigen::Index>(k));
        }
    }
    return x;
}

Simplicial update_vertices(const Dataset& data, const SparseCodes& codes, const Simplicial& s) {
    require_same_dim(data.dim(), s, "update_vertices");
    if (static_cast<Eigen::Index>(codes.size()) != data.size()) {
        throw InvalidInput("update_vertices: one code per data point required");
    }
    const Eigen::MatrixXd x = code_matrix(codes, s);
    Eigen::MatrixXd updated = data.points * geometry::pseudo_inverse(x);

    for (Eigen::Index v = 0; v < x.rows(); ++v) {
        if ((x.row(v).array() == 0.0).all()) updated.col(v) = s.vertices().col(v);
    }
    if (!updated.allFinite()) return s;
    return Simplicial(std::move(updated), s.hypergraph());
}

double reconstruction_error(const Eigen::VectorXd& y, const Simplicial& s) {
    require_same_dim(y.size(), s, "reconstruction_error");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < s.simplex_count(); ++j) {
        best = std::min(best, geometry::project_onto_simplex(y, s.simplex(j)).sq_error);
    }
    return best;
}

}  // namespace esl
