#include "esl/evolution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "esl/error.hpp"
#include "esl/parallel.hpp"

namespace esl {

void EvolutionConfig::validate() const {
    if (population_size < 1) throw InvalidInput("population_size must be >= 1");
    if (breed_pairs > 0 && population_size < 2) {
        throw InvalidInput("population_size must be >= 2 when breed_pairs > 0");
    }
    if (generations < 1) throw InvalidInput("generations must be >= 1");
    if (children_per_parent < 1) throw InvalidInput("children_per_parent must be >= 1");
    if (breed_pairs < 0) throw InvalidInput("breed_pairs must be >= 0");
    if (kmeans_k_init < 1) throw InvalidInput("kmeans_k_init must be >= 1");
    if (kmeans_dim_threshold < 1) throw InvalidInput("kmeans_dim_threshold must be >= 1");
    if (!(vertex_jitter >= 0.0)) throw InvalidInput("vertex_jitter must be >= 0");
    if (threads < 0) throw InvalidInput("threads must be >= 0");
    fitness.validate();
}

namespace {

std::size_t uniform_index(Rng& rng, std::size_t size) {
    return std::uniform_int_distribution<std::size_t>(0, size - 1)(rng);
}

Eigen::VectorXd near_data(const Dataset& data, Rng& rng, double jitter) {
    Eigen::VectorXd v = data.points.col(static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::size_t>(data.size()))));
    if (jitter > 0.0) {
        std::normal_distribution<double> noise(0.0, jitter);
        for (Eigen::Index r = 0; r < v.size(); ++r) v(r) += noise(rng);
    }
    return v;
}

// Sorts hyperedges, drops empty and duplicate ones (first occurrence wins)
// and removes vertices no hyperedge references.
Simplicial rebuild(const Eigen::MatrixXd& vertices, std::vector<Hyperedge> edges) {
    std::vector<Hyperedge> kept;
    std::set<Hyperedge> seen;
    for (auto& h : edges) {
        std::sort(h.begin(), h.end());
        h.erase(std::unique(h.begin(), h.end()), h.end());
        if (h.empty() || !seen.insert(h).second) continue;
        kept.push_back(std::move(h));
    }
    std::vector<int> remap(static_cast<std::size_t>(vertices.cols()), -1);
    for (const auto& h : kept) {
        for (int v : h) remap[static_cast<std::size_t>(v)] = 0;
    }
    int next = 0;
    for (auto& r : remap) {
        if (r == 0) r = next++;
    }
    Eigen::MatrixXd compact(vertices.rows(), next);
    for (Eigen::Index v = 0; v < vertices.cols(); ++v) {
        const int r = remap[static_cast<std::size_t>(v)];
        if (r >= 0) compact.col(r) = vertices.col(v);
    }
    for (auto& h : kept) {
        for (int& v : h) v = remap[static_cast<std::size_t>(v)];
    }
    return Simplicial(std::move(compact), Hypergraph(std::move(kept), next));
}

Eigen::MatrixXd append_column(const Eigen::MatrixXd& m, const Eigen::VectorXd& col) {
    Eigen::MatrixXd out(m.rows(), m.cols() + 1);
    out.leftCols(m.cols()) = m;
    out.col(m.cols()) = col;
    return out;
}

std::vector<std::size_t> edges_with_at_least(const Simplicial& s, std::size_t size) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < s.simplex_count(); ++j) {
        if (s.hypergraph()[j].size() >= size) out.push_back(j);
    }
    return out;
}

double sortable(double fitness) {
    return std::isnan(fitness) ? -std::numeric_limits<double>::infinity() : fitness;
}

}  // namespace

Eigen::MatrixXd kmeans(const Dataset& data, int k, Rng& rng, int max_iters) {
    const Eigen::Index n = data.size();
    if (k < 1 || k > n) {
        throw InvalidInput("kmeans: k must lie in [1, n]; got k=" + std::to_string(k) + ", n=" + std::to_string(n));
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::shuffle(order.begin(), order.end(), rng);

    Eigen::MatrixXd centroids(data.dim(), k);
    for (int c = 0; c < k; ++c) centroids.col(c) = data.points.col(order[static_cast<std::size_t>(c)]);

    std::vector<int> assign(static_cast<std::size_t>(n), -1);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = (data.points.col(i) - centroids.col(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assign[static_cast<std::size_t>(i)] != best) {
                assign[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(data.dim(), k);
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int c = assign[static_cast<std::size_t>(i)];
            sums.col(c) += data.points.col(i);
            ++counts[static_cast<std::size_t>(c)];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centroids.col(c) = sums.col(c) / counts[static_cast<std::size_t>(c)];
                continue;
            }
            // Empty cluster: steal the worst-represented sample.
            Eigen::Index far = 0;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double d = (data.points.col(i) - centroids.col(assign[static_cast<std::size_t>(i)])).squaredNorm();
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            centroids.col(c) = data.points.col(far);
            assign[static_cast<std::size_t>(far)] = c;
        }
    }
    return centroids;
}

std::optional<Simplicial> apply_mutation(const Simplicial& s, Mutation kind, const Dataset& data, Rng& rng,
                                         const EvolutionConfig& cfg) {
    if (data.dim() != s.dim()) throw InvalidInput("mutate: data and simplicial dimensions differ");
    std::vector<Hyperedge> edges = s.hypergraph().hyperedges();
    const int vcount = s.vertex_count();

    switch (kind) {
        case Mutation::GrowSimplex: {
            const std::size_t j = uniform_index(rng, edges.size());
            edges[j].push_back(vcount);
            return rebuild(append_column(s.vertices(), near_data(data, rng, cfg.vertex_jitter)), std::move(edges));
        }
        case Mutation::ShrinkSimplex: {
            const auto candidates = edges_with_at_least(s, 2);
            if (candidates.empty()) return std::nullopt;
            Hyperedge& h = edges[candidates[uniform_index(rng, candidates.size())]];
            h.erase(h.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, h.size())));
            return rebuild(s.vertices(), std::move(edges));
        }
        case Mutation::AddSimplex: {
            const int count = std::uniform_int_distribution<int>(1, 2)(rng);
            Eigen::MatrixXd vertices = s.vertices();
            Hyperedge h;
            for (int c = 0; c < count; ++c) {
                h.push_back(static_cast<int>(vertices.cols()));
                vertices = append_column(vertices, near_data(data, rng, cfg.vertex_jitter));
            }
            edges.push_back(std::move(h));
            return rebuild(vertices, std::move(edges));
        }
        case Mutation::RemoveSimplex: {
            if (edges.size() < 2) return std::nullopt;
            edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, edges.size())));
            return rebuild(s.vertices(), std::move(edges));
        }
        case Mutation::Subdivide: {
            const auto candidates = edges_with_at_least(s, 2);
            if (candidates.empty()) return std::nullopt;
            const std::size_t j = candidates[uniform_index(rng, candidates.size())];
            const Hyperedge h = edges[j];
            const Eigen::VectorXd center = s.simplex(j).rowwise().mean();
            edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(j));
            for (std::size_t drop = 0; drop < h.size(); ++drop) {
                Hyperedge face;
                for (std::size_t k = 0; k < h.size(); ++k) {
                    if (k != drop) face.push_back(h[k]);
                }
                face.push_back(vcount);
                edges.push_back(std::move(face));
            }
            return rebuild(append_column(s.vertices(), center), std::move(edges));
        }
        case Mutation::AddVertex: {
            edges.push_back({vcount});
            return rebuild(append_column(s.vertices(), near_data(data, rng, 0.0)), std::move(edges));
        }
        case Mutation::RemoveVertex: {
            if (vcount < 2) return std::nullopt;
            const int victim = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(vcount)));
            for (auto& h : edges) {
                std::erase(h, victim);
                for (int& v : h) {
                    if (v > victim) --v;
                }
            }
            Eigen::MatrixXd vertices(s.dim(), vcount - 1);
            vertices.leftCols(victim) = s.vertices().leftCols(victim);
            vertices.rightCols(vcount - 1 - victim) = s.vertices().rightCols(vcount - 1 - victim);
            return rebuild(vertices, std::move(edges));
        }
    }
    return std::nullopt;
}

Simplicial mutate(const Simplicial& s, const Dataset& data, Rng& rng, const EvolutionConfig& cfg) {
    using M = Mutation;
    // Each family lists its directions; subdivision has only one.
    const std::array<std::vector<M>, 4> families{{
        {M::GrowSimplex, M::ShrinkSimplex},
        {M::AddSimplex, M::RemoveSimplex},
        {M::Subdivide},
        {M::AddVertex, M::RemoveVertex},
    }};
    std::array<std::size_t, 4> order{0, 1, 2, 3};
    const std::size_t first = uniform_index(rng, order.size());
    std::swap(order[0], order[first]);
    std::shuffle(order.begin() + 1, order.end(), rng);

    for (std::size_t f : order) {
        std::vector<M> directions = families[f];
        if (directions.size() == 2 && std::bernoulli_distribution(0.5)(rng)) {
            std::swap(directions[0], directions[1]);
        }
        for (M kind : directions) {
            if (auto out = apply_mutation(s, kind, data, rng, cfg)) return std::move(*out);
        }
    }
    return s;  // unreachable: growing is always possible
}

Simplicial breed(const Simplicial& first, const Simplicial& second, Rng& rng) {
    if (first.dim() != second.dim()) {
        throw InvalidInput("breed: parents have dimensions " + std::to_string(first.dim()) + " and " +
                           std::to_string(second.dim()));
    }
    std::bernoulli_distribution keep(0.5);
    auto pick = [&](const Simplicial& parent) {
        std::vector<Hyperedge> chosen;
        while (chosen.empty()) {
            for (const auto& h : parent.hypergraph().hyperedges()) {
                if (keep(rng)) chosen.push_back(h);
            }
        }
        return chosen;
    };
    std::vector<Hyperedge> a = pick(first);
    std::vector<Hyperedge> b = pick(second);

    // Restrict each parent to its referenced vertices; offset the second block.
    auto restrict = [](const Simplicial& parent, std::vector<Hyperedge>& edges, int offset) {
        std::vector<int> remap(static_cast<std::size_t>(parent.vertex_count()), -1);
        for (const auto& h : edges) {
            for (int v : h) remap[static_cast<std::size_t>(v)] = 0;
        }
        std::vector<int> used;
        for (int v = 0; v < parent.vertex_count(); ++v) {
            if (remap[static_cast<std::size_t>(v)] == 0) {
                remap[static_cast<std::size_t>(v)] = offset + static_cast<int>(used.size());
                used.push_back(v);
            }
        }
        for (auto& h : edges) {
            for (int& v : h) v = remap[static_cast<std::size_t>(v)];
        }
        Eigen::MatrixXd cols(parent.dim(), static_cast<Eigen::Index>(used.size()));
        for (std::size_t k = 0; k < used.size(); ++k) cols.col(static_cast<Eigen::Index>(k)) = parent.vertices().col(used[k]);
        return cols;
    };
    const Eigen::MatrixXd va = restrict(first, a, 0);
    const Eigen::MatrixXd vb = restrict(second, b, static_cast<int>(va.cols()));

    Eigen::MatrixXd vertices(first.dim(), va.cols() + vb.cols());
    vertices << va, vb;
    a.insert(a.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end()));
    const auto count = static_cast<int>(vertices.cols());
    return Simplicial(std::move(vertices), Hypergraph(std::move(a), count));
}

Individual refine(const Dataset& data, const Simplicial& s, const FitnessConfig& cfg) {
    const Encoding first = encode(data, s);
    Simplicial updated = update_vertices(data, first.codes, s);
    const Encoding second = encode(data, updated);
    const double fitness = fitness_max(second.total_sse, updated, static_cast<long>(data.size()), cfg);
    return Individual{std::move(updated), fitness, second.total_sse};
}

namespace {

Simplicial zero_simplices(const Eigen::MatrixXd& centroids) {
    std::vector<Hyperedge> edges;
    for (int c = 0; c < centroids.cols(); ++c) edges.push_back({c});
    const auto count = static_cast<int>(centroids.cols());
    return Simplicial(centroids, Hypergraph(std::move(edges), count));
}

void sort_descending(std::vector<Individual>& pool) {
    std::stable_sort(pool.begin(), pool.end(), [](const Individual& a, const Individual& b) {
        return sortable(a.fitness) > sortable(b.fitness);
    });
}

}  // namespace

Population init_population(const Dataset& data, const EvolutionConfig& cfg, Rng& rng) {
    cfg.validate();
    const Eigen::Index n = data.size();
    int k = data.dim() <= cfg.kmeans_dim_threshold ? 1 : static_cast<int>(std::min<Eigen::Index>(cfg.kmeans_k_init, n));

    Simplicial start;
    for (;;) {
        const Eigen::MatrixXd centroids = k == 1 ? Eigen::MatrixXd(data.points.rowwise().mean()) : kmeans(data, k, rng);
        start = zero_simplices(centroids);
        const double sse = encode(data, start).total_sse;
        if (sse < static_cast<double>(n)) break;
        if (k >= n) {
            throw InitializationFailure("no initial simplicial reaches SSE < n (SSE " + std::to_string(sse) +
                                        ", n " + std::to_string(n) + "); is the data normalised?");
        }
        k = static_cast<int>(std::min<Eigen::Index>(2 * static_cast<Eigen::Index>(k), n));
    }

    std::vector<Simplicial> members;
    members.push_back(start);
    for (int i = 1; i < cfg.population_size; ++i) {
        Rng stream(rng());
        members.push_back(mutate(start, data, stream, cfg));
    }

    Population pop;
    pop.individuals.resize(members.size());
    parallel_for(members.size(), cfg.threads,
                 [&](std::size_t i) { pop.individuals[i] = refine(data, members[i], cfg.fitness); });
    sort_descending(pop.individuals);
    return pop;
}

EvolutionResult evolve(const Dataset& data, const EvolutionConfig& cfg) {
    cfg.validate();
    Rng master(cfg.seed);
    Population pop = init_population(data, cfg, master);

    EvolutionResult result;
    for (int gen = 0; gen < cfg.generations; ++gen) {
        std::vector<Individual>& parents = pop.individuals;

        // Structural moves are sequential; each child draws from its own stream.
        std::vector<Simplicial> offspring;
        for (const Individual& parent : parents) {
            for (int c = 0; c < cfg.children_per_parent; ++c) {
                Rng stream(master());
                offspring.push_back(mutate(parent.simplicial, data, stream, cfg));
            }
        }
        if (parents.size() >= 2) {
            for (int b = 0; b < cfg.breed_pairs; ++b) {
                const std::size_t i = uniform_index(master, parents.size());
                std::size_t j = uniform_index(master, parents.size() - 1);
                if (j >= i) ++j;
                Rng stream(master());
                offspring.push_back(breed(parents[i].simplicial, parents[j].simplicial, stream));
            }
        }

        std::vector<Individual> pool(parents.size() + offspring.size());
        parallel_for(pool.size(), cfg.threads, [&](std::size_t k) {
            if (k < parents.size()) {
                // A parent survives unchanged unless its own refinement helps.
                Individual again = refine(data, parents[k].simplicial, cfg.fitness);
                pool[k] = sortable(again.fitness) >= sortable(parents[k].fitness) ? std::move(again) : parents[k];
            } else {
                pool[k] = refine(data, offspring[k - parents.size()], cfg.fitness);
            }
        });

        sort_descending(pool);
        pool.resize(std::min<std::size_t>(pool.size(), static_cast<std::size_t>(cfg.population_size)));
        pop.individuals = std::move(pool);
        result.history.push_back(pop.individuals.front().fitness);
    }
    result.best = pop.individuals.front();
    return result;
}

}  // namespace esl
