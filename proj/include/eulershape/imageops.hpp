#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eulershape/complex.hpp"

namespace eulershape {

/// Row-major 0/1 pixel grid. pixel_pitch is the physical size of one pixel,
/// carried through I/O but not used by the topology code.
struct BinaryMask {
    int width = 0;
    int height = 0;
    double pixel_pitch = 1.0;
    std::vector<std::uint8_t> bits;

    bool at(int x, int y) const {
        return bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                    static_cast<std::size_t>(x)] != 0;
    }
    void set(int x, int y, bool fg) {
        bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
             static_cast<std::size_t>(x)] = fg ? 1 : 0;
    }
    std::int64_t area() const;
};

/// PGM P2/P5 (values above maxval/2 are foreground) or 0/1 CSV, chosen by
/// extension. Writers emit P5 with 0 background / 255 foreground.
BinaryMask read_mask(const std::string& path);
BinaryMask read_pgm(const std::string& path);
void write_pgm(const std::string& path, const BinaryMask& mask);
BinaryMask read_mask_csv(const std::string& path);
void write_mask_csv(const std::string& path, const BinaryMask& mask);

/// Normalisation pipeline, in this order: dilate the foreground by one pixel
/// (8-neighbourhood), keep the largest 4-connected component, fill holes
/// (background flood from the border, 8-connected; unreached background turns
/// foreground), rescale uniformly so the foreground area lands near
/// target_area (nearest neighbour), pad with background to out_size x
/// out_size, translate so the foreground centroid sits at the canvas centre
/// (rounded; clamped so no foreground pixel leaves the canvas).
/// Errors: empty foreground; scaled foreground larger than out_size.
BinaryMask preprocess_mask(const BinaryMask& mask, std::int64_t target_area, int out_size);

/// Position of one lattice tile within a mask.
struct TileRect {
    int row = 0;
    int col = 0;
    int x0 = 0;
    int y0 = 0;
    int side = 0;
};

/// Non-overlapping side x side lattice tiles; partial border tiles dropped.
std::vector<TileRect> tile_rects(const BinaryMask& mask, int side);
std::vector<BinaryMask> tile(const BinaryMask& mask, int side);
BinaryMask crop(const BinaryMask& mask, const TileRect& rect);

struct BettiPair {
    int b0 = 0;
    int b1 = 0;
};

/// b0 = foreground components under 4-connectivity (the convention the
/// cubical cell structure encodes); b1 = b0 - chi of the cubical complex.
BettiPair betti(const BinaryMask& mask);

/// Cell complex of the foreground: one square per pixel plus its sides and
/// corners, deduplicated. World scale: longest image side = 1 unit, image
/// centre at the origin.
CubicalComplex mask_to_complex(const BinaryMask& mask);

/// Per-pixel exact Euclidean distance (in pixels) to the nearest target
/// pixel, plus the region mask that depth queries average over.
struct DepthField {
    int width = 0;
    int height = 0;
    std::vector<double> dist;          // row-major, zero exactly on target pixels
    std::vector<std::uint8_t> region;  // row-major 0/1
};

/// Exact squared-distance transform by the two-pass separable lower-envelope
/// algorithm, then a square root. Errors on an empty target.
DepthField depth_field(const BinaryMask& region, const BinaryMask& target);

/// Mean distance over region pixels inside the tile; empty intersection
/// yields nullopt (reported missing, never zero).
std::optional<double> quadrant_depth(const DepthField& field, const TileRect& rect);

/// D(Q) = 1 - d_Q / max_Q' d_Q' across one collection of quadrants, so the
/// deepest tile gets 0 and tiles at the target get 1. All-zero input maps
/// to all ones.
std::vector<double> normalized_depths(const std::vector<double>& tile_means);

}  // namespace eulershape
