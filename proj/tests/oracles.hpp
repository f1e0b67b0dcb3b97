#pragma once

// Reference implementations used only by the tests. Each is deliberately
// naive so that it shares no code path with the library.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Best squared distance from y to points sum t_i v_i over a barycentric grid
// of step `step`. Supports 1 to 3 vertices.
inline double grid_sq_distance(const Eigen::VectorXd& y, const Eigen::MatrixXd& v, double step,
                               Eigen::VectorXd* best_t = nullptr) {
    const auto m = v.cols();
    const int steps = static_cast<int>(std::lround(1.0 / step));
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd t(m);
    auto consider = [&](const Eigen::VectorXd& w) {
        const double e = (y - v * w).squaredNorm();
        if (e < best) {
            best = e;
            if (best_t) *best_t = w;
        }
    };
    if (m == 1) {
        t << 1.0;
        consider(t);
    } else if (m == 2) {
        for (int i = 0; i <= steps; ++i) {
            const double a = i * step;
            t << 1.0 - a, a;
            consider(t);
        }
    } else if (m == 3) {
        // Expanded inline: this loop runs ~5e5 times per case.
        const Eigen::VectorXd v0 = v.col(0), e1 = v.col(1) - v0, e2 = v.col(2) - v0;
        const Eigen::VectorXd r0 = y - v0;
        for (int i = 0; i <= steps; ++i) {
            const double a = i * step;
            const Eigen::VectorXd r1 = r0 - a * e1;
            for (int j = 0; i + j <= steps; ++j) {
                const double b = j * step;
                const double e = (r1 - b * e2).squaredNorm();
                if (e < best) {
                    best = e;
                    if (best_t) {
                        best_t->resize(3);
                        *best_t << 1.0 - a - b, a, b;
                    }
                }
            }
        }
    } else {
        throw std::invalid_argument("grid oracle supports at most 3 vertices");
    }
    return best;
}

// Variational inequality for projection onto a convex hull: p is the
// projection of y iff (y - p) . (v_i - p) <= 0 for every vertex v_i.
inline double max_kkt_violation(const Eigen::VectorXd& y, const Eigen::VectorXd& p, const Eigen::MatrixXd& v) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < v.cols(); ++i) worst = std::max(worst, (y - p).dot(v.col(i) - p));
    return worst;
}

// Content of a simplex from the Gram determinant of its edge vectors: sqrt(det(E^T E)) / q!.
inline double gram_content(const Eigen::MatrixXd& v) {
    const auto q = v.cols() - 1;
    if (q == 0) return 0.0;
    Eigen::MatrixXd e(v.rows(), q);
    for (Eigen::Index i = 0; i < q; ++i) e.col(i) = v.col(i + 1) - v.col(0);
    const double g = (e.transpose() * e).determinant();
    double fact = 1.0;
    for (Eigen::Index i = 2; i <= q; ++i) fact *= static_cast<double>(i);
    return std::sqrt(std::max(0.0, g)) / fact;
}

// AUC by counting positive/negative pairs, ties counted as one half.
inline double pair_count_auc(const std::vector<double>& s, const std::vector<int>& y) {
    double wins = 0.0;
    long pos = 0, neg = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (y[i] == 1) ++pos; else ++neg;
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (y[i] != 1) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (y[j] == 1) continue;
            if (s[i] > s[j]) wins += 1.0;
            else if (s[i] == s[j]) wins += 0.5;
        }
    }
    return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

// Precision at n: sort by score descending (lower index first on ties), count positives in the top n.
inline double sort_count_precision(const std::vector<double>& s, const std::vector<int>& y) {
    std::vector<std::size_t> idx(s.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b] || (s[a] == s[b] && a < b); });
    const auto n = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n; ++k) hits += y[idx[k]] == 1;
    return static_cast<double>(hits) / static_cast<double>(n);
}

inline Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng, double sd = 1.0) {
    std::normal_distribution<double> g(0.0, sd);
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) m(i, j) = g(rng);
    return m;
}

}  // namespace oracle
