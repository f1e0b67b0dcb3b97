#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "esl/cli.hpp"
#include "esl/data.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = esl::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path workdir() {
    const fs::path dir = fs::temp_directory_path() / "esl_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

std::string p(const fs::path& path) { return path.string(); }

}  // namespace

TEST_CASE("cli: usage errors exit with 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"train", "--out", p(workdir() / "x.json")}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"train", "--data", p(workdir() / "missing.csv"), "--out", "x"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("cli: gen writes the requested CSV deterministically") {
    const fs::path a = workdir() / "corners_a.csv", b = workdir() / "corners_b.csv";
    REQUIRE(run({"gen", "--kind", "corners", "--n", "125", "--seed", "1", "--out", p(a)}).code == 0);
    REQUIRE(run({"gen", "--kind", "corners", "--n", "125", "--seed", "1", "--out", p(b)}).code == 0);
    CHECK(slurp(a) == slurp(b));
    const esl::Dataset d = esl::load_csv(a, true);
    CHECK(d.size() == 500);
    CHECK(std::set<int>(d.labels->begin(), d.labels->end()) == std::set<int>{0, 1, 2, 3});

    const Result bad = run({"gen", "--kind", "moons", "--out", p(workdir() / "m.csv")});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("two-spirals") != std::string::npos);
    CHECK(bad.err.find("mnist8") != std::string::npos);
}

TEST_CASE("cli: gen mnist8 doubles the source with pale copies") {
    const fs::path src = workdir() / "digits.csv", out = workdir() / "mnist8.csv";
    {
        std::ofstream f(src);
        f << "0,4,8,16\n16,16,0,2\n";
    }
    REQUIRE(run({"gen", "--kind", "mnist8", "--source", p(src), "--pixel-max", "16", "--out", p(out)}).code == 0);
    const esl::Dataset d = esl::load_csv(out, true);
    REQUIRE(d.size() == 4);
    CHECK(d.points(3, 0) == 1.0);
    CHECK(d.points(3, 2) == 0.25);
    CHECK(d.points(1, 3) == 0.25);
    CHECK(*d.labels == std::vector<int>{1, 1, 0, 0});
    CHECK(run({"gen", "--kind", "mnist8", "--out", p(out)}).code == 2);
}

TEST_CASE("cli: train is byte-for-byte reproducible and writes a manifest") {
    const fs::path data = workdir() / "blob.csv";
    REQUIRE(run({"gen", "--kind", "cluster-in-cluster", "--n", "60", "--seed", "2", "--out", p(data)}).code == 0);
    const fs::path m1 = workdir() / "m1.json", m2 = workdir() / "m2.json";
    REQUIRE(run({"train", "--data", p(data), "--out", p(m1), "--seed", "7"}).code == 0);
    REQUIRE(run({"train", "--data", p(data), "--out", p(m2), "--seed", "7"}).code == 0);
    CHECK(slurp(m1) == slurp(m2));
    const esl::ModelFile m = esl::load_model(m1);
    CHECK(m.normalization);
    CHECK(m.meta.seed == 7);

    const json manifest = json::parse(slurp(p(m1) + ".manifest.json"));
    CHECK(manifest["command"] == "train");
    CHECK(manifest["seed"] == 7);
    CHECK(manifest["config"]["beta"] == 0.05);
    CHECK(manifest["history"].size() == 5);
    CHECK(manifest["input_hashes"].size() == 1);
    CHECK(manifest["outputs"][0] == p(m1));
}

TEST_CASE("cli: train --labels writes one model per class") {
    const fs::path data = workdir() / "spirals.csv", dir = workdir() / "spiral_models";
    fs::remove_all(dir);
    REQUIRE(run({"gen", "--kind", "two-spirals", "--n", "80", "--seed", "3", "--out", p(data)}).code == 0);
    REQUIRE(run({"train", "--data", p(data), "--labels", "--out", p(dir)}).code == 0);
    CHECK(fs::exists(dir / "model_0.json"));
    CHECK(fs::exists(dir / "model_1.json"));
    CHECK(fs::exists(dir / "manifest.json"));
    const esl::ModelFile m0 = esl::load_model(dir / "model_0.json");
    CHECK(m0.meta.label == 0);
    REQUIRE(m0.normalization);
    CHECK(m0.normalization->span == doctest::Approx(esl::classification_span(2)));
}

TEST_CASE("cli: eval outlier on a perfectly separable file") {
    const fs::path data = workdir() / "toy_outliers.csv";
    {
        std::ofstream f(data);
        f << "x,y,label\n";
        for (int i = 0; i < 40; ++i) f << (i % 5) * 0.01 << "," << (i / 5) * 0.01 << ",0\n";
        // Scattered around a wide circle so no single simplex explains them.
        for (int i = 0; i < 10; ++i) f << 50 * std::cos(0.6283 * i) << "," << 50 * std::sin(0.6283 * i) << ",1\n";
    }
    const Result r = run({"eval", "outlier", "--data", p(data), "--runs", "3", "--json", "-"});
    REQUIRE(r.code == 0);
    const json report = json::parse(r.out.substr(r.out.find('{')));
    CHECK(report["metric"] == "auc_roc");
    CHECK(report["runs"].size() == 3);
    CHECK(report["mean"] == 1.0);
    CHECK(report["stdev"] == 0.0);
}

TEST_CASE("cli: eval rejects unlabelled data") {
    const fs::path data = workdir() / "unlabelled.csv";
    {
        std::ofstream f(data);
        f << "0.5,0.25\n0.125,0.75\n";
    }
    CHECK(run({"eval", "classify", "--data", p(data)}).code == 1);
    CHECK(run({"eval", "outlier", "--data", p(data)}).code == 1);
}

TEST_CASE("cli: eval classify reports accuracy") {
    const fs::path train = workdir() / "moon_train.csv", test = workdir() / "moon_test.csv";
    REQUIRE(run({"gen", "--kind", "crescent-full-moon", "--n", "100", "--seed", "4", "--out", p(train)}).code == 0);
    REQUIRE(run({"gen", "--kind", "crescent-full-moon", "--n", "100", "--seed", "5", "--out", p(test)}).code == 0);
    const Result r = run({"eval", "classify", "--data", p(train), "--test", p(test), "--json", "-"});
    REQUIRE(r.code == 0);
    const json report = json::parse(r.out.substr(r.out.find('{')));
    CHECK(report["metric"] == "accuracy");
    CHECK(report["mean"].get<double>() > 0.8);
}

TEST_CASE("cli: render structure") {
    const fs::path seg = workdir() / "segment.json";
    Eigen::MatrixXd v(2, 2);
    v << 0, 1,
         0, 1;
    esl::save_model(esl::Simplicial(v, esl::Hypergraph({{0, 1}}, 2)), seg);
    const Result r = run({"render", "--model", p(seg), "--out", "-"});
    REQUIRE(r.code == 0);
    CHECK(count_of(r.out, "class=\"edge\"") == 1);
    CHECK(count_of(r.out, "class=\"vertex\"") == 2);
    CHECK(r.out.find("<svg") != std::string::npos);

    const fs::path cube = workdir() / "cube.json";
    esl::save_model(esl::Simplicial::point(Eigen::Vector3d(0, 0, 0)), cube);
    const Result bad = run({"render", "--model", p(cube), "--out", "-"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("render supports 2-D models only") != std::string::npos);

    const fs::path data = workdir() / "render_data.csv", dir = workdir() / "render_models";
    REQUIRE(run({"gen", "--kind", "crescent-full-moon", "--n", "40", "--seed", "6", "--out", p(data)}).code == 0);
    REQUIRE(run({"train", "--data", p(data), "--labels", "--out", p(dir), "--generations", "2"}).code == 0);
    const Result two = run({"render", "--model", p(dir / "model_0.json"), "--model", p(dir / "model_1.json"),
                            "--data", p(data), "--labels", "--out", "-"});
    REQUIRE(two.code == 0);
    std::set<std::string> strokes;
    for (auto pos = two.out.find("<g class=\"model\" stroke=\""); pos != std::string::npos;
         pos = two.out.find("<g class=\"model\" stroke=\"", pos + 1)) {
        const auto start = pos + std::string("<g class=\"model\" stroke=\"").size();
        strokes.insert(two.out.substr(start, two.out.find('"', start) - start));
    }
    CHECK(strokes.size() == 2);
    CHECK(count_of(two.out, "class=\"data\"") == 80);
}

TEST_CASE("cli: the installed binary reports exit codes") {
    const std::string exe = ESL_CLI_PATH;
    CHECK(std::system((exe + " gen --kind corners --n 2 --out - > /dev/null").c_str()) == 0);
    const int usage = std::system((exe + " train > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(usage) == 2);
}
