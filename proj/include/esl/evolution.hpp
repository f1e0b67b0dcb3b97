#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "esl/fitness.hpp"
#include "esl/model.hpp"

namespace esl {

using Rng = std::mt19937_64;

struct EvolutionConfig {
    int population_size = 10;
    int generations = 5;
    int children_per_parent = 2;
    int breed_pairs = 5;
    int kmeans_k_init = 4;
    int kmeans_dim_threshold = 16;  // above this dimension, init from k-means
    double vertex_jitter = 0.01;    // std-dev of new-vertex noise, normalised units
    std::uint64_t seed = 0;
    int threads = 1;                // 0 = hardware concurrency
    FitnessConfig fitness;

    void validate() const;
};

struct Individual {
    Simplicial simplicial;
    double fitness = 0.0;
    double sse = 0.0;
};

/// Sorted by descending fitness after each selection step.
struct Population {
    std::vector<Individual> individuals;
};

enum class Mutation {
    GrowSimplex,     // add a vertex to a simplex
    ShrinkSimplex,   // drop a vertex from a simplex
    AddSimplex,
    RemoveSimplex,
    Subdivide,       // stellar subdivision at the barycenter
    AddVertex,       // isolated 0-simplex
    RemoveVertex,
};

/// Lloyd's algorithm from k distinct random samples. Returns d x k centroids.
/// An empty cluster is reseeded with the sample farthest from its centroid.
Eigen::MatrixXd kmeans(const Dataset& data, int k, Rng& rng, int max_iters = 100);

/// Applies one specific mutation, or nullopt when it is not applicable
/// (e.g. removing the last simplex).
std::optional<Simplicial> apply_mutation(const Simplicial& s, Mutation kind, const Dataset& data, Rng& rng,
                                         const EvolutionConfig& cfg);

/// One random mutation, uniformly over the four families and their
/// directions, falling back to another family when the draw is not applicable.
Simplicial mutate(const Simplicial& s, const Dataset& data, Rng& rng, const EvolutionConfig& cfg);

/// Crossover: a random non-empty subset of each parent's simplices, joined
/// side by side with disjoint vertex sets.
Simplicial breed(const Simplicial& first, const Simplicial& second, Rng& rng);

/// encode -> update_vertices -> encode, then scores the result.
Individual refine(const Dataset& data, const Simplicial& s, const FitnessConfig& cfg);

/// Centroid start (or k-means of 0-simplices in high dimension), k doubled
/// until SSE < n. Individual 0 is the unmutated start, the rest carry one
/// mutation each.
Population init_population(const Dataset& data, const EvolutionConfig& cfg, Rng& rng);

struct EvolutionResult {
    Individual best;
    std::vector<double> history;  // best fitness after each generation
};

/// Mutate, breed, refine, keep the fittest. Deterministic for a fixed seed
/// regardless of thread count.
EvolutionResult evolve(const Dataset& data, const EvolutionConfig& cfg);

}  // namespace esl
