// Python bindings. Arrays follow the numpy convention of one sample per row;
// the core library stores samples in columns, so every boundary transposes.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "esl/data.hpp"
#include "esl/error.hpp"
#include "esl/evolution.hpp"
#include "esl/fitness.hpp"
#include "esl/geometry.hpp"
#include "esl/model.hpp"
#include "esl/tasks.hpp"

namespace py = pybind11;
using namespace esl;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Dataset to_dataset(const RowMatrix& x, std::optional<std::vector<int>> labels = std::nullopt) {
    return Dataset(Eigen::MatrixXd(x.transpose()), std::move(labels));
}

RowMatrix rows(const Eigen::MatrixXd& columns) { return columns.transpose(); }

Simplicial make_simplicial(const RowMatrix& vertices, std::vector<Hyperedge> hyperedges) {
    return Simplicial(Eigen::MatrixXd(vertices.transpose()),
                      Hypergraph(std::move(hyperedges), static_cast<int>(vertices.rows())));
}

EvolutionConfig make_config(int population, int generations, double beta, double gamma, std::uint64_t seed,
                            int threads) {
    EvolutionConfig cfg;
    cfg.population_size = population;
    cfg.generations = generations;
    cfg.fitness.beta = beta;
    cfg.fitness.gamma = gamma;
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.validate();
    return cfg;
}

SyntheticKind kind_from(const std::string& name) {
    const auto kind = parse_synthetic_kind(name);
    if (!kind) throw InvalidInput("unknown kind '" + name + "'");
    return *kind;
}

}  // namespace

PYBIND11_MODULE(_esl, m) {
    m.doc() = "Simplicial dictionary learning by evolutionary search";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
    py::register_exception<InitializationFailure>(m, "InitializationFailure", PyExc_RuntimeError);

    py::class_<Simplicial>(m, "Simplicial")
        .def(py::init(&make_simplicial), py::arg("vertices"), py::arg("hyperedges"),
             "Vertices as rows (V x d); hyperedges as lists of vertex indices.")
        .def_property_readonly("vertices", [](const Simplicial& s) { return rows(s.vertices()); })
        .def_property_readonly("hyperedges", [](const Simplicial& s) { return s.hypergraph().hyperedges(); })
        .def_property_readonly("dim", &Simplicial::dim)
        .def("to_json", [](const Simplicial& s) { return model_to_json(ModelFile{s, std::nullopt, {}}); })
        .def_static("from_json", [](const std::string& text) { return model_from_json(text).simplicial; })
        .def("__eq__", &Simplicial::operator==)
        .def("__repr__", [](const Simplicial& s) {
            return "<Simplicial dim=" + std::to_string(s.dim()) + " vertices=" + std::to_string(s.vertex_count()) +
                   " simplices=" + std::to_string(s.simplex_count()) + ">";
        });

    m.def("simplex_content",
          [](const RowMatrix& v) { return geometry::simplex_content(Eigen::MatrixXd(v.transpose())); },
          py::arg("vertices"), "Length/area/volume of the simplex whose vertices are the rows.");
    m.def(
        "project_onto_simplex",
        [](const Eigen::VectorXd& y, const RowMatrix& v) {
            const geometry::Projection p = geometry::project_onto_simplex(y, Eigen::MatrixXd(v.transpose()));
            return py::make_tuple(p.point, p.barycentric, p.sq_error);
        },
        py::arg("y"), py::arg("vertices"), "Nearest point of the simplex: (point, barycentric, squared error).");

    m.def(
        "encode",
        [](const RowMatrix& x, const Simplicial& s) {
            const Encoding e = encode(to_dataset(x), s);
            std::vector<std::size_t> active;
            Eigen::VectorXd errors(static_cast<Eigen::Index>(e.codes.size()));
            for (std::size_t i = 0; i < e.codes.size(); ++i) {
                active.push_back(e.codes[i].active_edge);
                errors(static_cast<Eigen::Index>(i)) = e.codes[i].sq_error;
            }
            return py::make_tuple(active, rows(code_matrix(e.codes, s)), errors, e.total_sse);
        },
        py::arg("x"), py::arg("model"),
        "Sparse codes: (active hyperedge per sample, n x V code matrix, per-sample error, total SSE).");
    m.def(
        "update_vertices",
        [](const RowMatrix& x, const Simplicial& s) {
            const Dataset d = to_dataset(x);
            return update_vertices(d, encode(d, s).codes, s);
        },
        py::arg("x"), py::arg("model"), "One least-squares vertex update for the current codes.");
    m.def("fitness", [](const RowMatrix& x, const Simplicial& s, double beta, double gamma) {
            FitnessConfig cfg;
            cfg.beta = beta;
            cfg.gamma = gamma;
            cfg.validate();
            const Dataset d = to_dataset(x);
            return fitness_max(encode(d, s).total_sse, s, static_cast<long>(d.size()), cfg);
        },
        py::arg("x"), py::arg("model"), py::arg("beta") = 0.05, py::arg("gamma") = 10.0);

    m.def(
        "evolve",
        [](const RowMatrix& x, int population, int generations, double beta, double gamma, std::uint64_t seed,
           int threads) {
            const EvolutionConfig cfg = make_config(population, generations, beta, gamma, seed, threads);
            const Dataset d = to_dataset(x);
            EvolutionResult r;
            {
                py::gil_scoped_release release;
                r = evolve(d, cfg);
            }
            return py::make_tuple(r.best.simplicial, r.history, r.best.fitness, r.best.sse);
        },
        py::arg("x"), py::arg("population") = 10, py::arg("generations") = 5, py::arg("beta") = 0.05,
        py::arg("gamma") = 10.0, py::arg("seed") = 0, py::arg("threads") = 1,
        "Evolve a simplicial for x (already normalised): (model, best fitness per generation, fitness, SSE).");

    m.def(
        "fit_multiclass",
        [](const RowMatrix& x, const std::vector<int>& labels, int population, int generations, double beta,
           double gamma, std::uint64_t seed, int threads) {
            const EvolutionConfig cfg = make_config(population, generations, beta, gamma, seed, threads);
            const Dataset d = to_dataset(x, labels);
            py::gil_scoped_release release;
            return fit_multiclass(d, cfg).class_models;
        },
        py::arg("x"), py::arg("labels"), py::arg("population") = 10, py::arg("generations") = 5,
        py::arg("beta") = 0.05, py::arg("gamma") = 10.0, py::arg("seed") = 0, py::arg("threads") = 1,
        "One simplicial per label, as a dict.");
    m.def(
        "predict",
        [](const std::map<int, Simplicial>& models, const RowMatrix& x) {
            MulticlassModel mc;
            mc.class_models = models;
            std::vector<int> out;
            for (Eigen::Index i = 0; i < x.rows(); ++i) out.push_back(predict(mc, x.row(i).transpose()));
            return out;
        },
        py::arg("models"), py::arg("x"), "Label whose model reconstructs each sample best.");
    m.def(
        "outlier_scores", [](const Simplicial& s, const RowMatrix& x) { return outlier_scores(s, to_dataset(x)); },
        py::arg("model"), py::arg("x"), "Squared reconstruction error per sample.");

    m.def("auc_roc", &auc_roc, py::arg("scores"), py::arg("labels"));
    m.def("precision_at_n", &precision_at_n, py::arg("scores"), py::arg("labels"));

    m.def(
        "normalize",
        [](const RowMatrix& x, std::optional<double> span) {
            const auto [normed, spec] = normalize(to_dataset(x), NormalizationMode::MinMax, span);
            return py::make_tuple(rows(normed.points), spec.min, spec.max, spec.span);
        },
        py::arg("x"), py::arg("span") = py::none(),
        "Min-max scale each feature to [0, span]: (scaled, min, max, span).");
    m.def("classification_span", &classification_span, py::arg("dim"));

    m.def(
        "gen_synthetic",
        [](const std::string& kind, int n_per_class, std::optional<double> noise, std::uint64_t seed) {
            const SyntheticKind k = kind_from(kind);
            const Dataset d = gen_synthetic({k, n_per_class, noise.value_or(default_noise(k)), seed});
            return py::make_tuple(rows(d.points), *d.labels);
        },
        py::arg("kind"), py::arg("n_per_class") = 500, py::arg("noise") = py::none(), py::arg("seed") = 0,
        "Labelled 2-D benchmark set: (points, labels).");
    m.def("synthetic_kinds", &synthetic_kind_names);
}
