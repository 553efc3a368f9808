#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eulershape/geometry.hpp"

namespace eulershape {

/// Embedded simplicial complex in the plane. Vertices are implicit 0-simplices;
/// simplices[k-1] lists the k-simplices as strictly increasing vertex-index
/// tuples. Closure under faces is enforced by validate().
struct GeometricComplex {
    int dim = 2;  // ambient dimension
    std::vector<Vec2> vertices;
    std::vector<std::vector<std::vector<int>>> simplices;

    int max_simplex_dim() const { return static_cast<int>(simplices.size()); }

    const std::vector<std::vector<int>>& simplices_of_dim(int k) const {
        static const std::vector<std::vector<int>> kEmpty;
        if (k < 1 || k > max_simplex_dim()) return kEmpty;
        return simplices[static_cast<std::size_t>(k - 1)];
    }

    void add_simplex(std::vector<int> tuple);
};

/// Throws ValidationError naming the offending simplex on closure violations,
/// non-increasing tuples, duplicates, or out-of-range indices.
void validate(const GeometricComplex& k);

/// Cell complex of a binary image: one 2-cell per foreground pixel, plus the
/// bounding edges and corners. Cells shared between edge-adjacent pixels are
/// deduplicated; a lattice corner where pixels meet only diagonally splits
/// into two 0-cells, so connectivity and chi realise the 4-connected
/// foreground convention. Corner ids index the (width+1) x (height+1) lattice
/// as row * (width+1) + col; a split corner's second cell carries the same
/// lattice position offset by (width+1) * (height+1).
struct CubicalComplex {
    int width = 0;
    int height = 0;
    double pixel_size = 1.0;  // world units per pixel
    std::vector<int> corners;                 // sorted corner ids
    std::vector<std::array<int, 2>> edges;    // corner id pairs, lo < hi
    std::vector<int> squares;                 // pixel ids, row * width + col
    std::vector<std::array<int, 4>> square_corners;  // tl, tr, bl, br cell ids per square

    /// World coordinates of a lattice corner: image centre at the origin,
    /// y increasing upward. Both cells of a split corner share a position.
    Vec2 corner_coord(int corner_id) const {
        const int lattice = corner_id % ((width + 1) * (height + 1));
        const int row = lattice / (width + 1);
        const int col = lattice % (width + 1);
        return {(col - 0.5 * width) * pixel_size, (0.5 * height - row) * pixel_size};
    }
};

/// Uniform flat view used by the transform kernels: explicit 0-cells plus
/// every higher cell with its vertex list. Immutable after construction.
struct FlatComplex {
    std::vector<Vec2> vertices;
    std::vector<std::int8_t> cell_dim;   // one entry per cell, 0-cells included
    std::vector<int> cell_offset;        // cells + 1 offsets into cell_verts
    std::vector<int> cell_verts;

    std::size_t cell_count() const { return cell_dim.size(); }
    std::span<const int> cell(std::size_t c) const {
        return {cell_verts.data() + cell_offset[c],
                static_cast<std::size_t>(cell_offset[c + 1] - cell_offset[c])};
    }
};

FlatComplex flatten(const GeometricComplex& k);
FlatComplex flatten(const CubicalComplex& k);

int euler_characteristic(const GeometricComplex& k);
int euler_characteristic(const CubicalComplex& k);
int euler_characteristic(const FlatComplex& k);

/// Translate so the vertex barycentre sits at the origin. Errors on an empty
/// complex. Idempotent to 1e-12 on coordinates.
GeometricComplex center(const GeometricComplex& k);

/// Max Euclidean vertex norm; every height along any unit direction lies in
/// [-r, r]. Errors on an empty complex.
double bounding_radius(const GeometricComplex& k);
double bounding_radius(const FlatComplex& k);

/// Rotate all vertices counterclockwise by theta about the origin.
GeometricComplex rotated(const GeometricComplex& k, double theta);

/// Lower star of one vertex along a direction: the cells whose maximum height
/// is attained there, with ties going to the larger vertex index.
struct LowerStar {
    int anchor_vertex = 0;
    std::vector<std::pair<int, int>> members;  // (dim, index within that dim); (0, v) is the anchor
    int chi = 0;
};

/// One star per vertex; together they partition the cell set, and the chi
/// fields sum to the Euler characteristic. Requires |v| = 1 within 1e-9.
std::vector<LowerStar> lower_stars(const GeometricComplex& k, Vec2 v);

/// chi-only fast path: per-vertex heights and lower-star Euler contributions.
void lower_star_chi(const FlatComplex& k, Vec2 v,
                    std::vector<double>& heights, std::vector<int>& chi);

/// `.scx` text format: "scx 1" / "dim 2" / "vertices N" + N coordinate lines /
/// "simplices M" + M lines "k i0 ... ik". Validated on load.
GeometricComplex read_scx(const std::string& path);
void write_scx(const std::string& path, const GeometricComplex& k);

}  // namespace eulershape
