#include "eulershape/synth.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "eulershape/error.hpp"
#include "eulershape/io.hpp"
#include "eulershape/rng.hpp"

namespace eulershape {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

void validate(const TreeClassSpec& spec) {
    for (double len : spec.edge_lengths) {
        if (!(len > 0.0)) throw ValidationError("tree edge lengths must be positive");
    }
    if (spec.points_per_edge < 2) throw ValidationError("tree edges need at least 2 points");
    if (spec.sigma < 0.0) throw ValidationError("tree noise sigma must be nonnegative");
    if (spec.samples < 1) throw ValidationError("tree spec needs at least one sample");
}

void validate(const EllipseFieldSpec& spec) {
    if (spec.count < 1) throw ValidationError("ellipse field needs at least one ellipse");
    if (!(spec.major > 0.0) || !(spec.minor > 0.0)) {
        throw ValidationError("ellipse axes must be positive");
    }
    if (spec.boundary_points < 3) throw ValidationError("ellipses need at least 3 boundary points");
    if (spec.noise_sigma < 0.0) throw ValidationError("ellipse noise sigma must be nonnegative");
    if (!(spec.centers.side > 0.0) || !(spec.centers.major > 0.0) || !(spec.centers.minor > 0.0)) {
        throw ValidationError("centre sampler region parameters must be positive");
    }
}

Vec2 draw_center(const CenterSampler& s, CounterRng& rng) {
    switch (s.region) {
        case CenterRegion::Square: {
            const double h = s.side / 2.0;
            return {rng.uniform(-h, h), rng.uniform(-h, h)};
        }
        case CenterRegion::ThreeQuadrant: {
            // Centred square minus the open first quadrant.
            const double h = s.side / 2.0;
            while (true) {
                const Vec2 p{rng.uniform(-h, h), rng.uniform(-h, h)};
                if (!(p.x > 0.0 && p.y > 0.0)) return p;
            }
        }
        case CenterRegion::EllipseRegion: {
            const double ha = s.major / 2.0;
            const double hb = s.minor / 2.0;
            while (true) {
                const Vec2 p{rng.uniform(-ha, ha), rng.uniform(-hb, hb)};
                if ((p.x / ha) * (p.x / ha) + (p.y / hb) * (p.y / hb) <= 1.0) return p;
            }
        }
    }
    throw ValidationError("unknown centre sampler region");
}

}  // namespace

std::vector<GeometricComplex> gen_trees(const TreeClassSpec& spec, bool rotate,
                                        std::uint64_t seed) {
    validate(spec);
    std::vector<GeometricComplex> out(static_cast<std::size_t>(spec.samples));
    const int p = spec.points_per_edge;
    for (int i = 0; i < spec.samples; ++i) {
        const std::uint64_t sample_seed = CounterRng::derive(seed, static_cast<std::uint64_t>(i));
        CounterRng noise(CounterRng::derive(sample_seed, 0));
        CounterRng rot(CounterRng::derive(sample_seed, 1));
        GeometricComplex k;
        k.vertices.push_back({0.0, 0.0});  // shared origin
        for (int e = 0; e < 3; ++e) {
            const Vec2 dir = direction(spec.edge_angles[static_cast<std::size_t>(e)]);
            const double len = spec.edge_lengths[static_cast<std::size_t>(e)];
            int prev = 0;
            for (int j = 1; j < p; ++j) {
                const double along = len * j / (p - 1);
                Vec2 v = dir * along;
                v.x += spec.sigma * noise.gaussian();
                v.y += spec.sigma * noise.gaussian();
                k.vertices.push_back(v);
                const int cur = static_cast<int>(k.vertices.size()) - 1;
                k.add_simplex({prev, cur});
                prev = cur;
            }
        }
        if (rotate) {
            const double phi = rot.uniform(0.0, kTau);
            for (Vec2& v : k.vertices) v = eulershape::rotate(v, phi);
        }
        out[static_cast<std::size_t>(i)] = std::move(k);
    }
    return out;
}

GeometricComplex gen_ellipse_field(const EllipseFieldSpec& spec, std::uint64_t seed) {
    validate(spec);
    GeometricComplex k;
    const int b = spec.boundary_points;
    for (int e = 0; e < spec.count; ++e) {
        CounterRng rng(CounterRng::derive(seed, static_cast<std::uint64_t>(e)));
        const Vec2 center = draw_center(spec.centers, rng);
        const double phi = rng.uniform(0.0, kTau);
        const int c = static_cast<int>(k.vertices.size());
        k.vertices.push_back(center);
        for (int j = 0; j < b; ++j) {
            const double psi = kTau * j / b;
            Vec2 v{spec.major / 2.0 * std::cos(psi), spec.minor / 2.0 * std::sin(psi)};
            v = rotate(v, phi) + center;
            v.x += spec.noise_sigma * rng.gaussian();
            v.y += spec.noise_sigma * rng.gaussian();
            k.vertices.push_back(v);
        }
        // Fan triangulation about the centre vertex: spokes, boundary ring,
        // and one triangle per boundary segment.
        for (int j = 0; j < b; ++j) {
            const int cur = c + 1 + j;
            const int nxt = c + 1 + (j + 1) % b;
            k.add_simplex({c, cur});
            k.add_simplex({std::min(cur, nxt), std::max(cur, nxt)});
            std::vector<int> tri{c, cur, nxt};
            std::sort(tri.begin(), tri.end());
            k.add_simplex(std::move(tri));
        }
    }
    validate(k);
    return k;
}

TreeClassSpec tree_spec_from_json(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("bad tree spec JSON " + path + ": " + e.what());
    }
    TreeClassSpec spec;
    try {
        if (j.contains("edgeLengths")) spec.edge_lengths = j.at("edgeLengths");
        if (j.contains("edgeAngles")) spec.edge_angles = j.at("edgeAngles");
        if (j.contains("pointsPerEdge")) spec.points_per_edge = j.at("pointsPerEdge");
        if (j.contains("sigma")) spec.sigma = j.at("sigma");
        if (j.contains("samples")) spec.samples = j.at("samples");
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("bad tree spec JSON " + path + ": " + e.what());
    }
    validate(spec);
    return spec;
}

EllipseFieldSpec ellipse_spec_from_json(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("bad ellipse spec JSON " + path + ": " + e.what());
    }
    EllipseFieldSpec spec;
    try {
        if (j.contains("count")) spec.count = j.at("count");
        if (j.contains("major")) spec.major = j.at("major");
        if (j.contains("minor")) spec.minor = j.at("minor");
        if (j.contains("boundaryPoints")) spec.boundary_points = j.at("boundaryPoints");
        if (j.contains("noiseSigma")) spec.noise_sigma = j.at("noiseSigma");
        if (j.contains("centerSampler")) {
            const auto& cs = j.at("centerSampler");
            const std::string kind = cs.at("kind");
            if (kind == "square") {
                spec.centers.region = CenterRegion::Square;
            } else if (kind == "three-quadrant") {
                spec.centers.region = CenterRegion::ThreeQuadrant;
            } else if (kind == "ellipse-region") {
                spec.centers.region = CenterRegion::EllipseRegion;
            } else {
                throw ValidationError("unknown centre sampler kind '" + kind + "' in " + path);
            }
            if (cs.contains("side")) spec.centers.side = cs.at("side");
            if (cs.contains("major")) spec.centers.major = cs.at("major");
            if (cs.contains("minor")) spec.centers.minor = cs.at("minor");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("bad ellipse spec JSON " + path + ": " + e.what());
    }
    validate(spec);
    return spec;
}

}  // namespace eulershape
