#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "eulershape/complex.hpp"

namespace eulershape {

/// One class of noisy three-edge star trees: polyline edges radiating from
/// the origin at the class angles, Gaussian jitter on every non-origin vertex.
struct TreeClassSpec {
    std::array<double, 3> edge_lengths{2.0, 3.0, 4.0};
    std::array<double, 3> edge_angles{0.0, 2.0943951023931953, 4.1887902047863905};
    int points_per_edge = 100;
    double sigma = 0.02;
    int samples = 20;
};

/// Where ellipse centres are drawn from.
enum class CenterRegion { Square, ThreeQuadrant, EllipseRegion };

struct CenterSampler {
    CenterRegion region = CenterRegion::Square;
    double side = 50.0;    // Square / ThreeQuadrant: centred square side length
    double major = 100.0;  // EllipseRegion: full axis lengths
    double minor = 20.0;
};

/// A field of filled noisy ellipses at random centres and rotations.
struct EllipseFieldSpec {
    int count = 50;
    double major = 2.0;
    double minor = 1.0;
    int boundary_points = 80;
    double noise_sigma = 0.05;
    CenterSampler centers;
};

/// One complex per sample. Noise and the optional per-sample rotation come
/// from separate derived streams, so the rotate flag changes orientation only:
/// sample i with rotate=true is exactly a rotation of sample i without it.
std::vector<GeometricComplex> gen_trees(const TreeClassSpec& spec, bool rotate,
                                        std::uint64_t seed);

/// Disjoint union of `count` fan-triangulated ellipses (81 vertices, 160
/// edges, 80 triangles each), so chi equals the ellipse count even when the
/// drawings overlap. Per-ellipse derived seeds.
GeometricComplex gen_ellipse_field(const EllipseFieldSpec& spec, std::uint64_t seed);

/// JSON configs; missing keys keep the defaults above.
TreeClassSpec tree_spec_from_json(const std::string& path);
EllipseFieldSpec ellipse_spec_from_json(const std::string& path);

}  // namespace eulershape
