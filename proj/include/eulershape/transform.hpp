#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "eulershape/complex.hpp"
#include "eulershape/grid.hpp"

namespace eulershape {

/// Euler characteristic curve of one direction, sampled on a filtration grid.
struct EccCurve {
    FiltrationGrid grid;
    std::vector<std::int32_t> values;
};

/// ECT sampled at n evenly spaced directions theta_i = 2 pi i / n.
/// Rows are curves; the angle of row i is implied by (i, n_dirs).
struct EctMatrix {
    FiltrationGrid grid;
    int n_dirs = 0;
    std::vector<std::int32_t> values;  // n_dirs x grid.m, row-major

    double angle(int i) const;
    std::span<const std::int32_t> row(int i) const {
        return {values.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(grid.m),
                static_cast<std::size_t>(grid.m)};
    }
};

/// Empirical pushforward sample: n curves at directions drawn uniformly from
/// the seed. The directions themselves are deliberately not stored; the sample
/// is exchangeable and only the curves matter downstream.
struct CurveMeasure {
    FiltrationGrid grid;
    std::uint64_t seed = 0;
    int n_dirs = 0;
    std::vector<std::int32_t> values;  // n_dirs x grid.m, row-major

    std::span<const std::int32_t> row(int i) const {
        return {values.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(grid.m),
                static_cast<std::size_t>(grid.m)};
    }
};

/// Windowed histogram of a curve sample: windows tile the grid indices in
/// blocks of window_len (last window may be shorter), and mass[w][k] is the
/// fraction of curves exactly constant at value k across window w. Curves not
/// constant on a window contribute nothing there, so columns can sum below 1.
struct SampHistogram {
    FiltrationGrid grid;
    int window_len = 1;
    int sample_count = 0;
    int chi_min = 0;
    int chi_max = 0;
    bool range_expanded = false;  // requested chi range had to grow to cover the data
    std::vector<std::array<int, 2>> windows;  // [start, end) grid-index ranges
    std::vector<double> mass;                 // windows x (chi_max - chi_min + 1), row-major

    int bins() const { return chi_max - chi_min + 1; }
    double at(int w, int chi) const {
        return mass[static_cast<std::size_t>(w) * static_cast<std::size_t>(bins()) +
                    static_cast<std::size_t>(chi - chi_min)];
    }
};

/// Smoothed distance-type curve integrated over all directions.
struct DetectCurve {
    FiltrationGrid grid;
    std::vector<double> values;
};

/// chi of sublevel sets along v at each grid value, via one lower-star sweep.
/// Requires grid.a >= bounding_radius(k) so the curve starts at 0 and ends at
/// chi(k).
EccCurve ecc(const FlatComplex& k, Vec2 v, const FiltrationGrid& grid);
EccCurve ecc(const GeometricComplex& k, Vec2 v, const FiltrationGrid& grid);

/// ECT at n_dirs evenly spaced directions. Rows are computed in parallel and
/// the result is identical for any worker count.
EctMatrix ect(const FlatComplex& k, int n_dirs, const FiltrationGrid& grid);
EctMatrix ect(const GeometricComplex& k, int n_dirs, const FiltrationGrid& grid);

/// n_dirs curves at directions drawn i.i.d. uniform on [0, 2 pi) from the
/// seed. Angles are drawn sequentially up front, then rows are filled in
/// parallel, so results never depend on the worker count.
CurveMeasure sampeuler(const FlatComplex& k, int n_dirs, const FiltrationGrid& grid,
                       std::uint64_t seed);
CurveMeasure sampeuler(const GeometricComplex& k, int n_dirs, const FiltrationGrid& grid,
                       std::uint64_t seed);

/// Average over directions of the mean-centred cumulative integral of the
/// curve, scaled by 2 pi (the circumference carried by the direction integral).
DetectCurve detect(const EctMatrix& m);
DetectCurve detect(const CurveMeasure& s);
DetectCurve detect(const FlatComplex& k, int n_dirs, const FiltrationGrid& grid);
DetectCurve detect(const GeometricComplex& k, int n_dirs, const FiltrationGrid& grid);

/// Histogram of constant window values. The chi range defaults to the observed
/// value range symmetrised about 0; a requested range is widened when the data
/// falls outside it, with range_expanded set.
SampHistogram vectorize(const CurveMeasure& s, int window_len,
                        std::optional<std::pair<int, int>> chi_range = std::nullopt);

/// DETECT reconstructed from a window_len == 1 histogram: per-window mean chi,
/// then the same centred integral as detect(). Errors on window_len != 1 or an
/// empty histogram.
DetectCurve detect_from_histogram(const SampHistogram& h);

}  // namespace eulershape
