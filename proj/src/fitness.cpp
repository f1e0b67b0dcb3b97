#include "esl/fitness.hpp"

#include <algorithm>
#include <cmath>

#include "esl/error.hpp"
#include "esl/geometry.hpp"

namespace esl {

void FitnessConfig::validate() const {
    if (!(beta >= 0.0)) throw InvalidInput("beta must be >= 0");
    if (!(gamma > 0.0)) throw InvalidInput("gamma must be > 0");
    if (!(alpha >= 0.0)) throw InvalidInput("alpha must be >= 0");
    if (!(sse_floor > 0.0)) throw InvalidInput("sse_floor must be > 0");
}

double cumulative_content(const Simplicial& s) {
    double total = 0.0;
    for (std::size_t j = 0; j < s.simplex_count(); ++j) {
        const double content = geometry::simplex_content(s.simplex(j));
        total += std::pow(1.0 + content, static_cast<double>(s.hypergraph()[j].size()));
    }
    return total;
}

double fitness_max(double total_sse, const Simplicial& s, long n, const FitnessConfig& cfg) {
    if (total_sse < 0.0) throw InvalidInput("fitness_max: total_sse must be >= 0");
    if (n < 1) throw InvalidInput("fitness_max: n must be >= 1");
    const double fidelity = std::log10(static_cast<double>(n) / std::max(total_sse, cfg.sse_floor));
    if (cfg.beta == 0.0) return fidelity;
    return fidelity / (1.0 + cfg.beta * std::log10(cfg.gamma + cumulative_content(s)));
}

double fitness_min(double total_sse, const Simplicial& s, const FitnessConfig& cfg) {
    if (total_sse < 0.0) throw InvalidInput("fitness_min: total_sse must be >= 0");
    if (cfg.alpha == 0.0) return total_sse;
    return total_sse + cfg.alpha * cumulative_content(s);
}

}  // namespace esl
