#include <doctest.h>

#include <eulershape/complex.hpp>
#include <eulershape/error.hpp>
#include <eulershape/synth.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace eulershape;

namespace {

std::vector<double> pairwise_distances(const GeometricComplex& k) {
    std::vector<double> d;
    for (std::size_t i = 0; i < k.vertices.size(); ++i)
        for (std::size_t j = i + 1; j < k.vertices.size(); ++j)
            d.push_back(norm(k.vertices[i] - k.vertices[j]));
    std::sort(d.begin(), d.end());
    return d;
}

void write_file(const std::string& path, const std::string& text) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f != nullptr);
    std::fputs(text.c_str(), f);
    std::fclose(f);
}

}  // namespace

TEST_CASE("trees carry the documented vertex and edge counts") {
    TreeClassSpec spec;
    auto samples = gen_trees(spec, false, 7);
    REQUIRE(samples.size() == 20);
    for (const auto& k : samples) {
        CHECK(k.vertices.size() == 298);
        CHECK(k.simplices_of_dim(1).size() == 297);
        CHECK(k.max_simplex_dim() == 1);
        CHECK(euler_characteristic(k) == 1);
        validate(k);
    }
}

TEST_CASE("noiseless unrotated trees are all identical") {
    TreeClassSpec spec;
    spec.sigma = 0.0;
    spec.samples = 6;
    auto samples = gen_trees(spec, false, 3);
    for (std::size_t i = 1; i < samples.size(); ++i) {
        REQUIRE(samples[i].vertices.size() == samples[0].vertices.size());
        for (std::size_t v = 0; v < samples[0].vertices.size(); ++v) {
            CHECK(samples[i].vertices[v].x == samples[0].vertices[v].x);
            CHECK(samples[i].vertices[v].y == samples[0].vertices[v].y);
        }
        CHECK(samples[i].simplices == samples[0].simplices);
    }
}

TEST_CASE("noiseless tree vertices sit on the class rays") {
    TreeClassSpec spec;
    spec.sigma = 0.0;
    spec.samples = 1;
    GeometricComplex k = gen_trees(spec, false, 1)[0];
    CHECK(k.vertices[0].x == 0.0);
    CHECK(k.vertices[0].y == 0.0);
    double longest = 0.0;
    for (const Vec2& p : k.vertices)
        longest = std::max(longest, norm(p));
    CHECK(longest == doctest::Approx(4.0));
}

TEST_CASE("rotation changes orientation but not the distance multiset") {
    TreeClassSpec spec;
    spec.samples = 4;
    auto plain = gen_trees(spec, false, 11);
    auto turned = gen_trees(spec, true, 11);
    REQUIRE(plain.size() == turned.size());
    for (std::size_t i = 0; i < plain.size(); ++i) {
        auto da = pairwise_distances(plain[i]);
        auto db = pairwise_distances(turned[i]);
        REQUIRE(da.size() == db.size());
        for (std::size_t j = 0; j < da.size(); ++j)
            CHECK(da[j] == doctest::Approx(db[j]).epsilon(1e-9));
    }
}

TEST_CASE("tree generation is deterministic in the seed") {
    TreeClassSpec spec;
    spec.samples = 3;
    auto a = gen_trees(spec, false, 5);
    auto b = gen_trees(spec, false, 5);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t v = 0; v < a[i].vertices.size(); ++v) {
            CHECK(a[i].vertices[v].x == b[i].vertices[v].x);
            CHECK(a[i].vertices[v].y == b[i].vertices[v].y);
        }
    }
    auto c = gen_trees(spec, false, 6);
    bool any_differ = false;
    for (std::size_t v = 0; v < a[0].vertices.size() && !any_differ; ++v)
        any_differ = a[0].vertices[v].x != c[0].vertices[v].x;
    CHECK(any_differ);
}

TEST_CASE("tree spec validation") {
    TreeClassSpec bad;
    bad.points_per_edge = 1;
    CHECK_THROWS_AS(gen_trees(bad, false, 1), ValidationError);
    TreeClassSpec neg;
    neg.edge_lengths[1] = -2.0;
    CHECK_THROWS_AS(gen_trees(neg, false, 1), ValidationError);
}

TEST_CASE("a single clean ellipse is a contractible fan") {
    EllipseFieldSpec spec;
    spec.count = 1;
    spec.noise_sigma = 0.0;
    GeometricComplex k = gen_ellipse_field(spec, 9);
    CHECK(k.vertices.size() == 81);
    CHECK(k.simplices_of_dim(1).size() == 160);
    CHECK(k.simplices_of_dim(2).size() == 80);
    CHECK(euler_characteristic(k) == 1);
    validate(k);
}

TEST_CASE("an ellipse field has chi equal to its count") {
    EllipseFieldSpec spec;
    spec.count = 50;
    GeometricComplex k = gen_ellipse_field(spec, 10);
    CHECK(k.vertices.size() == 50u * 81u);
    CHECK(euler_characteristic(k) == 50);
    validate(k);
}

TEST_CASE("ellipse centres respect the sampler region") {
    EllipseFieldSpec spec;
    spec.count = 40;
    spec.noise_sigma = 0.0;

    SUBCASE("square") {
        spec.centers = {CenterRegion::Square, 50.0, 100.0, 20.0};
        GeometricComplex k = gen_ellipse_field(spec, 21);
        for (int e = 0; e < spec.count; ++e) {
            Vec2 c = k.vertices[static_cast<std::size_t>(e) * 81];  // centre vertex leads each block
            CHECK(std::abs(c.x) <= 25.0);
            CHECK(std::abs(c.y) <= 25.0);
        }
    }
    SUBCASE("three quadrants exclude the open first quadrant") {
        spec.centers = {CenterRegion::ThreeQuadrant, 50.0, 100.0, 20.0};
        GeometricComplex k = gen_ellipse_field(spec, 22);
        for (int e = 0; e < spec.count; ++e) {
            Vec2 c = k.vertices[static_cast<std::size_t>(e) * 81];
            CHECK(std::abs(c.x) <= 25.0);
            CHECK(std::abs(c.y) <= 25.0);
            CHECK_FALSE((c.x > 0.0 && c.y > 0.0));
        }
    }
    SUBCASE("ellipse region") {
        spec.centers = {CenterRegion::EllipseRegion, 50.0, 100.0, 20.0};
        GeometricComplex k = gen_ellipse_field(spec, 23);
        for (int e = 0; e < spec.count; ++e) {
            Vec2 c = k.vertices[static_cast<std::size_t>(e) * 81];
            double u = c.x / 50.0, v = c.y / 10.0;  // half axes
            CHECK(u * u + v * v <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("ellipse generation is deterministic and validates its spec") {
    EllipseFieldSpec spec;
    spec.count = 3;
    GeometricComplex a = gen_ellipse_field(spec, 4);
    GeometricComplex b = gen_ellipse_field(spec, 4);
    REQUIRE(a.vertices.size() == b.vertices.size());
    for (std::size_t i = 0; i < a.vertices.size(); ++i) {
        CHECK(a.vertices[i].x == b.vertices[i].x);
        CHECK(a.vertices[i].y == b.vertices[i].y);
    }

    EllipseFieldSpec bad;
    bad.count = 0;
    CHECK_THROWS_AS(gen_ellipse_field(bad, 1), ValidationError);
    EllipseFieldSpec flat;
    flat.minor = 0.0;
    CHECK_THROWS_AS(gen_ellipse_field(flat, 1), ValidationError);
}

TEST_CASE("json specs parse with defaults for missing keys") {
    write_file("tree.json",
               "{\"edgeAngles\": [0.1, 2.0, 4.0], \"sigma\": 0.05, \"samples\": 3}\n");
    TreeClassSpec t = tree_spec_from_json("tree.json");
    CHECK(t.edge_angles[0] == doctest::Approx(0.1));
    CHECK(t.sigma == doctest::Approx(0.05));
    CHECK(t.samples == 3);
    CHECK(t.points_per_edge == 100);  // default kept
    CHECK(t.edge_lengths[2] == doctest::Approx(4.0));
    std::remove("tree.json");

    write_file("field.json",
               "{\"count\": 7, \"centerSampler\": {\"kind\": \"three-quadrant\", \"side\": 30}}\n");
    EllipseFieldSpec e = ellipse_spec_from_json("field.json");
    CHECK(e.count == 7);
    CHECK(e.centers.region == CenterRegion::ThreeQuadrant);
    CHECK(e.centers.side == doctest::Approx(30.0));
    CHECK(e.major == doctest::Approx(2.0));
    std::remove("field.json");

    write_file("bad.json", "{\"centerSampler\": {\"kind\": \"pentagon\"}}\n");
    CHECK_THROWS_AS(ellipse_spec_from_json("bad.json"), ValidationError);
    std::remove("bad.json");
    CHECK_THROWS_AS(tree_spec_from_json("absent.json"), IoError);
}

TEST_CASE("shipped presets parse") {
    TreeClassSpec a = tree_spec_from_json(std::string(TEST_PRESETS_DIR) + "/tree_class_a.json");
    TreeClassSpec b = tree_spec_from_json(std::string(TEST_PRESETS_DIR) + "/tree_class_b.json");
    CHECK(a.edge_lengths != b.edge_lengths);
    EllipseFieldSpec f =
        ellipse_spec_from_json(std::string(TEST_PRESETS_DIR) + "/ellipse_field_square.json");
    CHECK(f.count >= 1);
}
