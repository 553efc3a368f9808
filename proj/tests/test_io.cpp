#include <doctest.h>

#include <eulershape/complex.hpp>
#include <eulershape/error.hpp>
#include <eulershape/io.hpp>
#include <eulershape/rng.hpp>
#include <eulershape/transform.hpp>

#include "test_support.hpp"

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

using namespace eulershape;
using testsupport::random_complex;

namespace {

void remove_with_sidecar(const std::string& csv) {
    std::remove(csv.c_str());
    std::remove(sidecar_path(csv).c_str());
}

}  // namespace

TEST_CASE("format_double round-trips awkward values") {
    for (double v : {1.0 / 3.0, 0.1, 1e-300, -2.5e17, 0.0, 123456.789/997.0}) {
        double back = std::stod(format_double(v));
        CHECK(back == v);
    }
}

TEST_CASE("content digest is stable and content sensitive") {
    CHECK(content_digest("abc") == content_digest("abc"));
    CHECK(content_digest("abc") != content_digest("abd"));
    CHECK(content_digest("").size() == 16);
}

TEST_CASE("atomic writes leave no temp file behind") {
    atomic_write_text("atomic.txt", "payload\n");
    CHECK(read_text_file("atomic.txt") == "payload\n");
    int stray = 0;
    for (const auto& entry : std::filesystem::directory_iterator(".")) {
        if (entry.path().filename().string().find("atomic.txt.") == 0)
            ++stray;
    }
    CHECK(stray == 0);
    std::remove("atomic.txt");
    CHECK_THROWS_AS(read_text_file("definitely_absent.txt"), IoError);
}

TEST_CASE("distance matrix csv round-trips bit-exactly") {
    CounterRng rng(1);
    DistanceMatrix m;
    m.ids = {"alpha", "beta", "gamma", "delta"};
    m.values.assign(16, 0.0);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            double v = rng.uniform(0.0, 3.0);
            m.values[static_cast<std::size_t>(i) * 4 + j] = v;
            m.values[static_cast<std::size_t>(j) * 4 + i] = v;
        }
    write_distance_csv("dist.csv", m);
    DistanceMatrix back = read_distance_csv("dist.csv");
    CHECK(back.ids == m.ids);
    CHECK(back.values == m.values);
    std::remove("dist.csv");
}

TEST_CASE("ect csv round-trips with its sidecar") {
    CounterRng rng(2);
    GeometricComplex k = random_complex(rng);
    FiltrationGrid grid = make_grid(1.7, 23);
    EctMatrix m = ect(k, 6, grid);
    write_ect_csv("curves.csv", m);

    CurveFile file = read_curves_csv("curves.csv");
    REQUIRE(file.fixed);
    CHECK(file.ect.n_dirs == m.n_dirs);
    CHECK(file.ect.grid == m.grid);
    CHECK(file.ect.values == m.values);
    remove_with_sidecar("curves.csv");
}

TEST_CASE("sample csv round-trips with seed metadata") {
    CounterRng rng(3);
    GeometricComplex k = random_complex(rng);
    FiltrationGrid grid = make_grid(1.7, 19);
    CurveMeasure s = sampeuler(k, 5, grid, 42);
    write_sample_csv("sample.csv", s);

    CurveFile file = read_curves_csv("sample.csv");
    REQUIRE_FALSE(file.fixed);
    CHECK(file.sample.seed == 42);
    CHECK(file.sample.n_dirs == 5);
    CHECK(file.sample.grid == s.grid);
    CHECK(file.sample.values == s.values);
    remove_with_sidecar("sample.csv");
}

TEST_CASE("histogram csv round-trips masses and range flags") {
    CounterRng rng(4);
    GeometricComplex k = random_complex(rng);
    FiltrationGrid grid = make_grid(1.7, 30);
    CurveMeasure s = sampeuler(k, 12, grid, 7);
    SampHistogram h = vectorize(s, 7, std::pair<int, int>{0, 0});
    write_histogram_csv("hist.csv", h);

    SampHistogram back = read_histogram_csv("hist.csv");
    CHECK(back.grid == h.grid);
    CHECK(back.window_len == h.window_len);
    CHECK(back.sample_count == h.sample_count);
    CHECK(back.chi_min == h.chi_min);
    CHECK(back.chi_max == h.chi_max);
    CHECK(back.range_expanded == h.range_expanded);
    CHECK(back.windows == h.windows);
    CHECK(back.mass == h.mass);
    remove_with_sidecar("hist.csv");
}

TEST_CASE("detect csv round-trips") {
    CounterRng rng(5);
    GeometricComplex k = random_complex(rng);
    FiltrationGrid grid = make_grid(1.7, 33);
    DetectCurve d = detect(k, 16, grid);
    write_detect_csv("detect.csv", d);

    DetectCurve back = read_detect_csv("detect.csv");
    CHECK(back.grid == d.grid);
    CHECK(back.values == d.values);
    remove_with_sidecar("detect.csv");
}

TEST_CASE("curve readers reject malformed input") {
    atomic_write_text("bad.csv", "1,2,x\n");
    atomic_write_text(sidecar_path("bad.csv"),
                      "{\"kind\": \"curves\", \"mode\": \"fixed\", \"a\": 1.0, \"m\": 3, "
                      "\"n_dirs\": 1, \"seed\": 0}");
    CHECK_THROWS_AS(read_curves_csv("bad.csv"), IoError);
    remove_with_sidecar("bad.csv");

    atomic_write_text("orphan.csv", "1,2,3\n");
    CHECK_THROWS_AS(read_curves_csv("orphan.csv"), IoError);
    std::remove("orphan.csv");
}

TEST_CASE("sidecar path swaps the extension") {
    CHECK(sidecar_path("a/b/c.csv") == "a/b/c.json");
    CHECK(sidecar_path("noext") == "noext.json");
}
