#include "esl/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "esl/error.hpp"

namespace esl {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

Dataset parse_csv(std::string_view text, bool has_labels) {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::size_t width = 0;
    std::size_t row_no = 0;
    bool first_content_row = true;

    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++row_no;
        if (row_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
        if (trim(line).empty()) continue;

        const auto fields = split_fields(line);
        if (first_content_row) {
            first_content_row = false;
            double probe = 0.0;
            const bool header = std::any_of(fields.begin(), fields.end(),
                                            [&](std::string_view f) { return !parse_number(f, probe); });
            width = fields.size();
            if (header) continue;
        }
        if (fields.size() != width) {
            throw ParseError("row " + std::to_string(row_no) + ": expected " + std::to_string(width) +
                             " columns, found " + std::to_string(fields.size()));
        }
        if (has_labels && width < 2) {
            throw ParseError("row " + std::to_string(row_no) + ": need at least one feature and a label");
        }
        const std::size_t features = has_labels ? width - 1 : width;
        std::vector<double> row(features);
        for (std::size_t c = 0; c < features; ++c) {
            if (!parse_number(fields[c], row[c]) || !std::isfinite(row[c])) {
                throw ParseError("row " + std::to_string(row_no) + ", column " + std::to_string(c + 1) +
                                 ": not a finite number: '" + std::string(fields[c]) + "'");
            }
        }
        if (has_labels) {
            int label = 0;
            if (!parse_number(fields.back(), label)) {
                double as_double = 0.0;
                if (!parse_number(fields.back(), as_double) || as_double != std::floor(as_double)) {
                    throw ParseError("row " + std::to_string(row_no) + ", column " + std::to_string(width) +
                                     ": label is not an integer: '" + std::string(fields.back()) + "'");
                }
                label = static_cast<int>(as_double);
            }
            labels.push_back(label);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("no data rows");

    Eigen::MatrixXd points(static_cast<Eigen::Index>(rows.front().size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t c = 0; c < rows[i].size(); ++c) {
            points(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) = rows[i][c];
        }
    }
    if (has_labels) return Dataset(std::move(points), std::move(labels));
    return Dataset(std::move(points));
}

Dataset load_csv(const std::filesystem::path& path, bool has_labels) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_csv(ss.str(), has_labels);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string to_csv(const Dataset& data, const std::vector<std::string>& header) {
    std::string out;
    if (!header.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c) out += ',';
            out += header[c];
        }
        out += '\n';
    }
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        for (Eigen::Index r = 0; r < data.dim(); ++r) {
            if (r) out += ',';
            out += format_double(data.points(r, i));
        }
        if (data.labels) {
            out += ',';
            out += std::to_string((*data.labels)[static_cast<std::size_t>(i)]);
        }
        out += '\n';
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------

bool NormalizationSpec::operator==(const NormalizationSpec& o) const {
    auto same = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.size() == b.size() && a == b; };
    return mode == o.mode && span == o.span && same(min, o.min) && same(max, o.max) && same(mean, o.mean) && same(stdev, o.stdev);
}

double classification_span(Eigen::Index dim) {
    if (dim < 1) throw InvalidInput("dimension must be positive");
    return 16.0 / std::sqrt(static_cast<double>(dim));
}

std::pair<Dataset, NormalizationSpec> normalize(const Dataset& data, NormalizationMode mode,
                                                std::optional<double> span) {
    NormalizationSpec spec;
    spec.mode = mode;
    spec.span = span.value_or(1.0);
    if (!(spec.span > 0.0) || !std::isfinite(spec.span)) throw InvalidInput("normalisation span must be positive");
    if (mode == NormalizationMode::MinMax) {
        spec.min = data.points.rowwise().minCoeff();
        spec.max = data.points.rowwise().maxCoeff();
    } else {
        spec.mean = data.points.rowwise().mean();
        const Eigen::MatrixXd centered = data.points.colwise() - spec.mean;
        spec.stdev = (centered.rowwise().squaredNorm() / static_cast<double>(data.size())).cwiseSqrt();
    }
    return {apply_normalization(spec, data), spec};
}

Dataset apply_normalization(const NormalizationSpec& spec, const Dataset& data) {
    const Eigen::VectorXd offset = spec.offset();
    const Eigen::VectorXd scale = spec.scale();
    if (offset.size() != data.dim() || scale.size() != data.dim()) {
        throw InvalidInput("normalisation has " + std::to_string(offset.size()) +
                           " features but data has " + std::to_string(data.dim()));
    }
    Dataset out = data;
    for (Eigen::Index r = 0; r < data.dim(); ++r) {
        if (scale(r) > 0.0) {
            out.points.row(r) = spec.span * (data.points.row(r).array() - offset(r)) / scale(r);
        } else {
            out.points.row(r).setZero();
        }
    }
    return out;
}

Dataset invert_normalization(const NormalizationSpec& spec, const Dataset& data) {
    const Eigen::VectorXd offset = spec.offset();
    const Eigen::VectorXd scale = spec.scale();
    if (offset.size() != data.dim()) throw InvalidInput("normalisation feature count mismatch");
    Dataset out = data;
    for (Eigen::Index r = 0; r < data.dim(); ++r) {
        out.points.row(r) = data.points.row(r).array() / spec.span * scale(r) + offset(r);
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct KindInfo {
    SyntheticKind kind;
    const char* name;
    int classes;
    double noise;
};

constexpr KindInfo kKinds[] = {
    {SyntheticKind::ClusterInCluster, "cluster-in-cluster", 2, 0.3},
    {SyntheticKind::TwoSpirals, "two-spirals", 2, 0.4},
    {SyntheticKind::HalfKernel, "half-kernel", 2, 2.0},
    {SyntheticKind::CrescentFullMoon, "crescent-full-moon", 2, 0.5},
    {SyntheticKind::Corners, "corners", 4, 0.2},
    {SyntheticKind::Outliers, "outliers", 4, 0.2},
};

const KindInfo& info(SyntheticKind kind) {
    for (const auto& k : kKinds) {
        if (k.kind == kind) return k;
    }
    throw InvalidInput("unknown synthetic kind");
}

constexpr double kPi = std::numbers::pi;

Eigen::Vector2d polar(double r, double phi) { return {r * std::cos(phi), r * std::sin(phi)}; }

Eigen::Vector2d rotate_quarter(const Eigen::Vector2d& p, int quarters) {
    Eigen::Vector2d q = p;
    for (int i = 0; i < quarters; ++i) q = Eigen::Vector2d(-q.y(), q.x());
    return q;
}

// Radius with uniform density over the annulus [r0, r1].
double annulus_radius(std::mt19937_64& rng, double r0, double r1) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return std::sqrt(r0 * r0 + u * (r1 * r1 - r0 * r0));
}

}  // namespace

std::string_view to_string(SyntheticKind kind) { return info(kind).name; }

std::optional<SyntheticKind> parse_synthetic_kind(std::string_view name) {
    for (const auto& k : kKinds) {
        if (name == k.name) return k.kind;
    }
    return std::nullopt;
}

const std::vector<std::string>& synthetic_kind_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& k : kKinds) v.emplace_back(k.name);
        return v;
    }();
    return names;
}

int class_count(SyntheticKind kind) { return info(kind).classes; }
double default_noise(SyntheticKind kind) { return info(kind).noise; }

Dataset gen_synthetic(const SyntheticSpec& spec) {
    if (spec.n_per_class < 1) throw InvalidInput("n_per_class must be >= 1");
    if (!(spec.noise >= 0.0)) throw InvalidInput("noise must be >= 0");
    const int classes = class_count(spec.kind);
    const int n = spec.n_per_class;

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Eigen::MatrixXd points(2, static_cast<Eigen::Index>(classes) * n);
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(classes * n));

    Eigen::Index col = 0;
    auto emit = [&](const Eigen::Vector2d& p, int label) {
        points.col(col++) = p;
        labels.push_back(label);
    };

    switch (spec.kind) {
        case SyntheticKind::ClusterInCluster:
            // Truncated inner Gaussian (r < 3) inside a uniform annulus 5 <= r <= 7.
            for (int i = 0; i < n; ++i) {
                Eigen::Vector2d p;
                do {
                    p = {gauss(rng), gauss(rng)};
                } while (p.norm() >= 3.0);
                emit(p, 0);
            }
            for (int i = 0; i < n; ++i) emit(polar(annulus_radius(rng, 5.0, 7.0), 2.0 * kPi * unit(rng)), 1);
            break;
        case SyntheticKind::TwoSpirals: {
            // r = theta over theta in [0, 3 pi]; class 1 is class 0 rotated by pi.
            // Points are emitted in order of increasing theta.
            std::vector<double> u(static_cast<std::size_t>(n));
            for (int c = 0; c < 2; ++c) {
                for (auto& v : u) v = unit(rng);
                std::sort(u.begin(), u.end());
                for (double v : u) {
                    const double theta = 3.0 * kPi * std::sqrt(v);  // uniform along the arc
                    emit(polar(theta, theta + c * kPi), c);
                }
            }
            break;
        }
        case SyntheticKind::HalfKernel:
            // Concentric upper half-ellipses (aspect 0.6) of radius 20 and 35.
            for (int c = 0; c < 2; ++c) {
                const double r = c == 0 ? 20.0 : 35.0;
                for (int i = 0; i < n; ++i) {
                    const double phi = kPi * unit(rng);
                    emit(Eigen::Vector2d(r * std::cos(phi), 0.6 * r * std::sin(phi)), c);
                }
            }
            break;
        case SyntheticKind::CrescentFullMoon:
            // Disc r <= 5 and the lower half of the annulus 10 <= r <= 15.
            for (int i = 0; i < n; ++i) emit(polar(annulus_radius(rng, 0.0, 5.0), 2.0 * kPi * unit(rng)), 0);
            for (int i = 0; i < n; ++i) emit(polar(annulus_radius(rng, 10.0, 15.0), kPi + kPi * unit(rng)), 1);
            break;
        case SyntheticKind::Corners:
            // L-shaped strips of width 1 with arms of length 8, one per quadrant.
            for (int c = 0; c < 4; ++c) {
                for (int i = 0; i < n; ++i) {
                    const double along = 1.0 + 8.0 * unit(rng);
                    const double across = 1.0 + unit(rng);
                    const bool horizontal = unit(rng) < 0.5;
                    const Eigen::Vector2d p = horizontal ? Eigen::Vector2d(along, across) : Eigen::Vector2d(across, along);
                    emit(rotate_quarter(p, c), c);
                }
            }
            break;
        case SyntheticKind::Outliers:
            // Each class: a tight cluster at (6, 6) plus a sparse uniform
            // background over its quadrant [0, 10]^2 (one fifth of the points).
            for (int c = 0; c < 4; ++c) {
                const int background = n / 5;
                for (int i = 0; i < n; ++i) {
                    const Eigen::Vector2d p = i < background ? Eigen::Vector2d(10.0 * unit(rng), 10.0 * unit(rng))
                                                             : Eigen::Vector2d(6.0 + 0.6 * gauss(rng), 6.0 + 0.6 * gauss(rng));
                    emit(rotate_quarter(p, c), c);
                }
            }
            break;
    }

    if (spec.noise > 0.0) {
        for (Eigen::Index i = 0; i < points.cols(); ++i) {
            points(0, i) += spec.noise * gauss(rng);
            points(1, i) += spec.noise * gauss(rng);
        }
    }
    return Dataset(std::move(points), std::move(labels));
}

Dataset build_mnist8(const Dataset& images, double scale) {
    if (!(scale > 0.0 && scale < 1.0)) throw InvalidInput("scale must lie in (0, 1)");
    if (images.points.minCoeff() < 0.0 || images.points.maxCoeff() > 1.0) {
        throw InvalidInput("pixel values must lie in [0, 1]");
    }
    const Eigen::Index n = images.size();
    Eigen::MatrixXd points(images.dim(), 2 * n);
    points.leftCols(n) = images.points;
    points.rightCols(n) = images.points * scale;
    std::vector<int> labels(static_cast<std::size_t>(2 * n), 0);
    std::fill(labels.begin(), labels.begin() + n, 1);
    return Dataset(std::move(points), std::move(labels));
}

// ---------------------------------------------------------------------------

using nlohmann::json;

std::string model_to_json(const ModelFile& model) {
    const Simplicial& s = model.simplicial;
    json doc;
    doc["dim"] = s.dim();
    json vertices = json::array();
    for (Eigen::Index v = 0; v < s.vertices().cols(); ++v) {
        json col = json::array();
        for (Eigen::Index r = 0; r < s.dim(); ++r) col.push_back(s.vertices()(r, v));
        vertices.push_back(std::move(col));
    }
    doc["vertices"] = std::move(vertices);
    doc["hyperedges"] = s.hypergraph().hyperedges();
    if (model.normalization) {
        const auto& n = *model.normalization;
        auto list = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
        if (n.mode == NormalizationMode::MinMax) {
            doc["normalization"] = {{"mode", "min-max"}, {"min", list(n.min)}, {"max", list(n.max)}, {"span", n.span}};
        } else {
            doc["normalization"] = {{"mode", "z-score"}, {"mean", list(n.mean)}, {"stdev", list(n.stdev)}, {"span", n.span}};
        }
    } else {
        doc["normalization"] = nullptr;
    }
    json meta = {{"beta", model.meta.beta}, {"gamma", model.meta.gamma}, {"seed", model.meta.seed}};
    if (model.meta.label) meta["label"] = *model.meta.label;
    doc["meta"] = std::move(meta);
    return doc.dump(2) + "\n";
}

namespace {

const json& field(const json& obj, const char* name, const std::string& where = "") {
    const std::string path = where.empty() ? name : where + "." + name;
    if (!obj.is_object() || !obj.contains(name)) throw SchemaError("model file: missing field '" + path + "'");
    return obj.at(name);
}

std::vector<double> number_list(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError("model file: '" + path + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : j) {
        if (!x.is_number()) throw SchemaError("model file: '" + path + "' must contain only numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

}  // namespace

ModelFile model_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("model file: invalid JSON: ") + e.what());
    }
    const json& dim_j = field(doc, "dim");
    if (!dim_j.is_number_integer() || dim_j.get<long long>() < 1) {
        throw SchemaError("model file: 'dim' must be a positive integer");
    }
    const auto dim = static_cast<Eigen::Index>(dim_j.get<long long>());

    const json& vertices_j = field(doc, "vertices");
    if (!vertices_j.is_array() || vertices_j.empty()) {
        throw SchemaError("model file: 'vertices' must be a non-empty array");
    }
    Eigen::MatrixXd vertices(dim, static_cast<Eigen::Index>(vertices_j.size()));
    for (std::size_t v = 0; v < vertices_j.size(); ++v) {
        const auto coords = number_list(vertices_j[v], "vertices[" + std::to_string(v) + "]");
        if (static_cast<Eigen::Index>(coords.size()) != dim) {
            throw SchemaError("model file: 'vertices[" + std::to_string(v) + "]' has " +
                              std::to_string(coords.size()) + " coordinates, expected " + std::to_string(dim));
        }
        for (Eigen::Index r = 0; r < dim; ++r) vertices(r, static_cast<Eigen::Index>(v)) = coords[static_cast<std::size_t>(r)];
    }

    const json& edges_j = field(doc, "hyperedges");
    if (!edges_j.is_array() || edges_j.empty()) {
        throw SchemaError("model file: 'hyperedges' must be a non-empty array");
    }
    std::vector<Hyperedge> edges;
    for (std::size_t j = 0; j < edges_j.size(); ++j) {
        const std::string path = "hyperedges[" + std::to_string(j) + "]";
        if (!edges_j[j].is_array() || edges_j[j].empty()) throw SchemaError("model file: '" + path + "' must be a non-empty array");
        Hyperedge h;
        for (const auto& x : edges_j[j]) {
            if (!x.is_number_integer()) throw SchemaError("model file: '" + path + "' must contain integers");
            const auto idx = x.get<long long>();
            if (idx < 0 || idx >= vertices.cols()) {
                throw SchemaError("model file: '" + path + "' index " + std::to_string(idx) +
                                  " outside [0, " + std::to_string(vertices.cols()) + ")");
            }
            h.push_back(static_cast<int>(idx));
        }
        edges.push_back(std::move(h));
    }

    ModelFile out;
    try {
        const auto count = static_cast<int>(vertices.cols());
        out.simplicial = Simplicial(std::move(vertices), Hypergraph(std::move(edges), count));
    } catch (const InvalidInput& e) {
        throw SchemaError(std::string("model file: 'hyperedges': ") + e.what());
    }

    const json& norm_j = field(doc, "normalization");
    if (!norm_j.is_null()) {
        const json& mode_j = field(norm_j, "mode", "normalization");
        if (!mode_j.is_string()) throw SchemaError("model file: 'normalization.mode' must be a string");
        NormalizationSpec spec;
        std::vector<double> a;
        std::vector<double> b;
        if (mode_j.get<std::string>() == "min-max") {
            spec.mode = NormalizationMode::MinMax;
            a = number_list(field(norm_j, "min", "normalization"), "normalization.min");
            b = number_list(field(norm_j, "max", "normalization"), "normalization.max");
        } else if (mode_j.get<std::string>() == "z-score") {
            spec.mode = NormalizationMode::ZScore;
            a = number_list(field(norm_j, "mean", "normalization"), "normalization.mean");
            b = number_list(field(norm_j, "stdev", "normalization"), "normalization.stdev");
        } else {
            throw SchemaError("model file: 'normalization.mode' must be \"min-max\" or \"z-score\"");
        }
        if (static_cast<Eigen::Index>(a.size()) != dim || static_cast<Eigen::Index>(b.size()) != dim) {
            throw SchemaError("model file: 'normalization' vectors must have 'dim' entries");
        }
        const Eigen::VectorXd first = Eigen::Map<Eigen::VectorXd>(a.data(), dim);
        const Eigen::VectorXd second = Eigen::Map<Eigen::VectorXd>(b.data(), dim);
        if (spec.mode == NormalizationMode::MinMax) {
            spec.min = first;
            spec.max = second;
        } else {
            spec.mean = first;
            spec.stdev = second;
        }
        if (norm_j.contains("span")) {
            const json& span_j = norm_j.at("span");
            if (!span_j.is_number() || !(span_j.get<double>() > 0.0) || !std::isfinite(span_j.get<double>())) {
                throw SchemaError("model file: 'normalization.span' must be a positive number");
            }
            spec.span = span_j.get<double>();
        }
        out.normalization = std::move(spec);
    }

    const json& meta_j = field(doc, "meta");
    const json& beta_j = field(meta_j, "beta", "meta");
    const json& gamma_j = field(meta_j, "gamma", "meta");
    const json& seed_j = field(meta_j, "seed", "meta");
    if (!beta_j.is_number() || !gamma_j.is_number()) throw SchemaError("model file: 'meta.beta' and 'meta.gamma' must be numbers");
    if (!seed_j.is_number_integer()) throw SchemaError("model file: 'meta.seed' must be an integer");
    out.meta.beta = beta_j.get<double>();
    out.meta.gamma = gamma_j.get<double>();
    out.meta.seed = seed_j.get<std::uint64_t>();
    if (meta_j.contains("label")) {
        if (!meta_j["label"].is_number_integer()) throw SchemaError("model file: 'meta.label' must be an integer");
        out.meta.label = meta_j["label"].get<int>();
    }
    return out;
}

void save_model(const ModelFile& model, const std::filesystem::path& path) {
    write_file_atomic(path, model_to_json(model));
}

void save_model(const Simplicial& s, const std::filesystem::path& path) {
    save_model(ModelFile{s, std::nullopt, {}}, path);
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot read model file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

}  // namespace esl
