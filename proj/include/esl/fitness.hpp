#pragma once

#include "esl/model.hpp"

namespace esl {

struct FitnessConfig {
    double beta = 0.05;       // over/under-fit regulator
    double gamma = 10.0;      // offset inside the compactness log
    double alpha = 1.0;       // weight of the content term in the minimisation form
    double sse_floor = 1e-12; // guards log10(n / 0)

    /// Throws InvalidInput when a field is out of range.
    void validate() const;
};

/// Sum over simplices of (1 + C_j)^|h_j|, C_j the simplex content.
double cumulative_content(const Simplicial& s);

/// log10(n / SSE) / (1 + beta * log10(gamma + cumulative_content)).
/// Larger is better; positive iff SSE < n.
double fitness_max(double total_sse, const Simplicial& s, long n, const FitnessConfig& cfg);

/// SSE + alpha * cumulative_content. Smaller is better. Not used by training.
double fitness_min(double total_sse, const Simplicial& s, const FitnessConfig& cfg);

}  // namespace esl
