#include "esl/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>

#include "esl/error.hpp"

namespace esl {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// Convex hull (Andrew's monotone chain), counter-clockwise.
std::vector<Eigen::Vector2d> hull(std::vector<Eigen::Vector2d> pts) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    if (pts.size() < 3) return pts;
    auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    std::vector<Eigen::Vector2d> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
        h[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

}  // namespace

std::string render_svg(const std::vector<RenderLayer>& layers, const std::optional<Dataset>& data, int size_px) {
    for (const auto& layer : layers) {
        if (layer.model.dim() != 2) throw InvalidInput("render supports 2-D models only");
    }
    if (data && data->dim() != 2) throw InvalidInput("render supports 2-D models only");

    double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
    double hi_x = -lo_x, hi_y = -lo_x;
    auto extend = [&](const Eigen::MatrixXd& m) {
        if (m.cols() == 0) return;
        lo_x = std::min(lo_x, m.row(0).minCoeff());
        hi_x = std::max(hi_x, m.row(0).maxCoeff());
        lo_y = std::min(lo_y, m.row(1).minCoeff());
        hi_y = std::max(hi_y, m.row(1).maxCoeff());
    };
    for (const auto& layer : layers) extend(layer.model.vertices());
    if (data) extend(data->points);
    if (!(lo_x <= hi_x)) lo_x = hi_x = lo_y = hi_y = 0.0;
    const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
    const double margin = 20.0;
    const double scale = (size_px - 2.0 * margin) / span;
    auto px = [&](double x) { return margin + (x - lo_x) * scale; };
    auto py = [&](double y) { return size_px - margin - (y - lo_y) * scale; };

    // Colour by label when layers carry one, otherwise by layer order.
    std::map<int, std::size_t> label_colour;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].label) label_colour.emplace(*layers[i].label, i % kPaletteSize);
    }
    auto colour_of_label = [&](int label) -> const char* {
        auto it = label_colour.find(label);
        if (it == label_colour.end()) it = label_colour.emplace(label, label_colour.size() % kPaletteSize).first;
        return kPalette[it->second];
    };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(size_px) +
           "\" height=\"" + std::to_string(size_px) + "\" viewBox=\"0 0 " + std::to_string(size_px) + " " +
           std::to_string(size_px) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    if (data) {
        out += "<g id=\"data\">\n";
        for (Eigen::Index i = 0; i < data->size(); ++i) {
            const char* colour = data->labels ? colour_of_label((*data->labels)[static_cast<std::size_t>(i)]) : "#7f7f7f";
            out += "<circle class=\"data\" cx=\"" + num(px(data->points(0, i))) + "\" cy=\"" +
                   num(py(data->points(1, i))) + "\" r=\"1.5\" fill=\"" + colour + "\" fill-opacity=\"0.35\"/>\n";
        }
        out += "</g>\n";
    }

    for (std::size_t li = 0; li < layers.size(); ++li) {
        const auto& layer = layers[li];
        const char* colour = layer.label ? colour_of_label(*layer.label) : kPalette[li % kPaletteSize];
        const Eigen::MatrixXd& v = layer.model.vertices();
        out += "<g class=\"model\" stroke=\"" + std::string(colour) + "\">\n";
        for (const auto& h : layer.model.hypergraph().hyperedges()) {
            if (h.size() >= 3) {
                std::vector<Eigen::Vector2d> pts;
                for (int idx : h) pts.emplace_back(v(0, idx), v(1, idx));
                std::string poly;
                for (const auto& p : hull(pts)) poly += num(px(p.x())) + "," + num(py(p.y())) + " ";
                if (!poly.empty()) poly.pop_back();
                out += "<polygon class=\"simplex\" points=\"" + poly + "\" fill=\"" + colour +
                       "\" fill-opacity=\"0.25\" stroke=\"none\"/>\n";
            }
            for (std::size_t a = 0; a < h.size(); ++a) {
                for (std::size_t b = a + 1; b < h.size(); ++b) {
                    out += "<line class=\"edge\" x1=\"" + num(px(v(0, h[a]))) + "\" y1=\"" + num(py(v(1, h[a]))) +
                           "\" x2=\"" + num(px(v(0, h[b]))) + "\" y2=\"" + num(py(v(1, h[b]))) +
                           "\" stroke-width=\"2\"/>\n";
                }
            }
        }
        for (Eigen::Index c = 0; c < v.cols(); ++c) {
            out += "<circle class=\"vertex\" cx=\"" + num(px(v(0, c))) + "\" cy=\"" + num(py(v(1, c))) +
                   "\" r=\"4\" fill=\"" + colour + "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
        }
        out += "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace esl
