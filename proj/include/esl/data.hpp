#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "esl/model.hpp"

namespace esl {

// ---------------------------------------------------------------------------
// CSV

/// One sample per row. With `has_labels`, the last column is an integer
/// label. A first row containing any non-numeric cell is treated as a header.
/// Throws ParseError naming the 1-based row and column on bad input.
Dataset load_csv(const std::filesystem::path& path, bool has_labels);
Dataset parse_csv(std::string_view text, bool has_labels);

/// Inverse of parse_csv; labels become the last column when present.
std::string to_csv(const Dataset& data, const std::vector<std::string>& header = {});

/// Writes `content` to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// ---------------------------------------------------------------------------
// Normalisation

enum class NormalizationMode { MinMax, ZScore };

/// Per-feature statistics recorded from training data. Features map through
/// x' = span * (x - offset) / scale; a zero scale marks a constant feature, which maps to 0.
struct NormalizationSpec {
    NormalizationMode mode = NormalizationMode::MinMax;
    double span = 1.0;
    Eigen::VectorXd min, max;     // min-max mode
    Eigen::VectorXd mean, stdev;  // z-score mode

    Eigen::VectorXd offset() const { return mode == NormalizationMode::MinMax ? min : mean; }
    Eigen::VectorXd scale() const { return mode == NormalizationMode::MinMax ? Eigen::VectorXd(max - min) : stdev; }

    bool operator==(const NormalizationSpec&) const;
};

/// Min-max span used for multi-class training: the normalised bounding box
/// gets a diagonal of 16 whatever the dimension.
double classification_span(Eigen::Index dim);

/// Span defaults to 1, i.e. min-max to [0, 1].
std::pair<Dataset, NormalizationSpec> normalize(const Dataset& data,
                                                NormalizationMode mode = NormalizationMode::MinMax,
                                                std::optional<double> span = std::nullopt);
Dataset apply_normalization(const NormalizationSpec& spec, const Dataset& data);
Dataset invert_normalization(const NormalizationSpec& spec, const Dataset& data);

// ---------------------------------------------------------------------------
// Synthetic benchmarks

enum class SyntheticKind { ClusterInCluster, TwoSpirals, HalfKernel, CrescentFullMoon, Corners, Outliers };

struct SyntheticSpec {
    SyntheticKind kind = SyntheticKind::TwoSpirals;
    int n_per_class = 500;
    double noise = 0.0;  // isotropic Gaussian std-dev, in generator units
    std::uint64_t seed = 0;
};

/// Canonical names: cluster-in-cluster, two-spirals, half-kernel,
/// crescent-full-moon, corners, outliers.
std::string_view to_string(SyntheticKind kind);
std::optional<SyntheticKind> parse_synthetic_kind(std::string_view name);
const std::vector<std::string>& synthetic_kind_names();

int class_count(SyntheticKind kind);
/// Noise level used when none is requested explicitly.
double default_noise(SyntheticKind kind);

/// 2-D labelled points, n_per_class per class, labels 0..classes-1,
/// grouped by class. Deterministic for a fixed spec.
Dataset gen_synthetic(const SyntheticSpec& spec);

/// Bright (label 1) originals followed by pale copies (label 0) scaled by
/// `scale`. Pixels must lie in [0, 1]; scale in (0, 1).
Dataset build_mnist8(const Dataset& images, double scale = 0.25);

// ---------------------------------------------------------------------------
// Model files

struct ModelMeta {
    double beta = 0.05;
    double gamma = 10.0;
    std::uint64_t seed = 0;
    std::optional<int> label;
};

struct ModelFile {
    Simplicial simplicial;
    std::optional<NormalizationSpec> normalization;
    ModelMeta meta;
};

/// JSON document: {"dim", "vertices", "hyperedges", "normalization", "meta"}.
std::string model_to_json(const ModelFile& model);
/// Throws SchemaError naming the missing or invalid field.
ModelFile model_from_json(std::string_view text);

void save_model(const ModelFile& model, const std::filesystem::path& path);
void save_model(const Simplicial& s, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace esl
