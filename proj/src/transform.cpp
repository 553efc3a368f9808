#include "eulershape/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "eulershape/error.hpp"
#include "eulershape/parallel.hpp"
#include "eulershape/rng.hpp"

namespace eulershape {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

void require_covering(const FlatComplex& k, const FiltrationGrid& grid) {
    const double r = bounding_radius(k);
    if (r > grid.a) {
        throw ValidationError("filtration half-width " + std::to_string(grid.a) +
                              " does not cover the complex (bounding radius " +
                              std::to_string(r) + ")");
    }
}

/// One curve: sort vertices by height, then sweep the grid accumulating
/// lower-star Euler contributions of the vertices at or below each t.
void fill_row(const FlatComplex& k, Vec2 v, const FiltrationGrid& grid, std::int32_t* out) {
    std::vector<double> heights;
    std::vector<int> chi;
    lower_star_chi(k, v, heights, chi);
    std::vector<int> order(heights.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return heights[static_cast<std::size_t>(a)] <
                                         heights[static_cast<std::size_t>(b)]; });
    std::size_t next = 0;
    std::int32_t cum = 0;
    for (int i = 0; i < grid.m; ++i) {
        const double t = grid.point(i);
        while (next < order.size() &&
               heights[static_cast<std::size_t>(order[next])] <= t) {
            cum += chi[static_cast<std::size_t>(order[next])];
            ++next;
        }
        out[i] = cum;
    }
}

/// Mean-centred cumulative trapezoid integral of one row, accumulated into
/// acc. Shared by detect() and detect_from_histogram().
void accumulate_centred_integral(const double* row, const FiltrationGrid& grid, double* acc) {
    const int m = grid.m;
    const double dt = grid.step();
    double total = 0.5 * (row[0] + row[m - 1]);
    for (int j = 1; j + 1 < m; ++j) total += row[j];
    const double mean = total * dt / (2.0 * grid.a);
    double f = 0.0;
    acc[0] += f;
    for (int j = 1; j < m; ++j) {
        f += 0.5 * dt * ((row[j - 1] - mean) + (row[j] - mean));
        acc[j] += f;
    }
}

DetectCurve detect_rows(const std::int32_t* values, int n, const FiltrationGrid& grid) {
    if (n < 1) throw ValidationError("detect needs at least one direction");
    std::vector<double> acc(static_cast<std::size_t>(grid.m), 0.0);
    std::vector<double> row(static_cast<std::size_t>(grid.m));
    for (int i = 0; i < n; ++i) {
        const std::int32_t* src = values + static_cast<std::size_t>(i) * static_cast<std::size_t>(grid.m);
        for (int j = 0; j < grid.m; ++j) row[static_cast<std::size_t>(j)] = src[j];
        accumulate_centred_integral(row.data(), grid, acc.data());
    }
    DetectCurve d{grid, std::move(acc)};
    for (double& x : d.values) x *= kTau / n;
    return d;
}

}  // namespace

double EctMatrix::angle(int i) const { return kTau * i / n_dirs; }

EccCurve ecc(const FlatComplex& k, Vec2 v, const FiltrationGrid& grid) {
    require_covering(k, grid);
    EccCurve c{grid, std::vector<std::int32_t>(static_cast<std::size_t>(grid.m))};
    fill_row(k, v, grid, c.values.data());
    return c;
}

EccCurve ecc(const GeometricComplex& k, Vec2 v, const FiltrationGrid& grid) {
    return ecc(flatten(k), v, grid);
}

EctMatrix ect(const FlatComplex& k, int n_dirs, const FiltrationGrid& grid) {
    if (n_dirs < 1) throw ValidationError("ect needs at least one direction");
    require_covering(k, grid);
    EctMatrix m{grid, n_dirs,
                std::vector<std::int32_t>(static_cast<std::size_t>(n_dirs) *
                                          static_cast<std::size_t>(grid.m))};
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
    for (int i = 0; i < n_dirs; ++i) {
        fill_row(k, direction(m.angle(i)), grid,
                 m.values.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(grid.m));
    }
    return m;
}

EctMatrix ect(const GeometricComplex& k, int n_dirs, const FiltrationGrid& grid) {
    return ect(flatten(k), n_dirs, grid);
}

CurveMeasure sampeuler(const FlatComplex& k, int n_dirs, const FiltrationGrid& grid,
                       std::uint64_t seed) {
    if (n_dirs < 1) throw ValidationError("sampeuler needs at least one direction");
    require_covering(k, grid);
    // Draw every angle up front in counter order; the parallel fill then owns
    // disjoint integer rows, so output is bit-identical for any worker count.
    CounterRng rng(seed);
    std::vector<double> angles(static_cast<std::size_t>(n_dirs));
    for (double& a : angles) a = rng.uniform(0.0, kTau);
    CurveMeasure s{grid, seed, n_dirs,
                   std::vector<std::int32_t>(static_cast<std::size_t>(n_dirs) *
                                             static_cast<std::size_t>(grid.m))};
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
    for (int i = 0; i < n_dirs; ++i) {
        fill_row(k, direction(angles[static_cast<std::size_t>(i)]), grid,
                 s.values.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(grid.m));
    }
    return s;
}

CurveMeasure sampeuler(const GeometricComplex& k, int n_dirs, const FiltrationGrid& grid,
                       std::uint64_t seed) {
    return sampeuler(flatten(k), n_dirs, grid, seed);
}

DetectCurve detect(const EctMatrix& m) { return detect_rows(m.values.data(), m.n_dirs, m.grid); }

DetectCurve detect(const CurveMeasure& s) { return detect_rows(s.values.data(), s.n_dirs, s.grid); }

DetectCurve detect(const FlatComplex& k, int n_dirs, const FiltrationGrid& grid) {
    return detect(ect(k, n_dirs, grid));
}

DetectCurve detect(const GeometricComplex& k, int n_dirs, const FiltrationGrid& grid) {
    return detect(flatten(k), n_dirs, grid);
}

SampHistogram vectorize(const CurveMeasure& s, int window_len,
                        std::optional<std::pair<int, int>> chi_range) {
    if (s.n_dirs < 1) throw ValidationError("vectorize needs a non-empty curve sample");
    if (window_len < 1) throw ValidationError("window length must be at least 1");
    SampHistogram h;
    h.grid = s.grid;
    h.window_len = window_len;
    h.sample_count = s.n_dirs;
    for (int start = 0; start < s.grid.m; start += window_len) {
        h.windows.push_back({start, std::min(start + window_len, s.grid.m)});
    }
    const auto [lo_it, hi_it] = std::minmax_element(s.values.begin(), s.values.end());
    const int lo = *lo_it;
    const int hi = *hi_it;
    if (chi_range) {
        if (chi_range->first > chi_range->second) {
            throw ValidationError("chi range is inverted");
        }
        h.chi_min = std::min(chi_range->first, lo);
        h.chi_max = std::max(chi_range->second, hi);
        h.range_expanded = chi_range->first > lo || chi_range->second < hi;
    } else {
        const int bound = std::max(std::abs(lo), std::abs(hi));
        h.chi_min = -bound;
        h.chi_max = bound;
    }
    const std::size_t bins = static_cast<std::size_t>(h.bins());
    std::vector<std::int64_t> counts(h.windows.size() * bins, 0);
    for (int i = 0; i < s.n_dirs; ++i) {
        const auto row = s.row(i);
        for (std::size_t w = 0; w < h.windows.size(); ++w) {
            const auto [start, end] = h.windows[w];
            const std::int32_t value = row[static_cast<std::size_t>(start)];
            bool constant = true;
            for (int j = start + 1; j < end; ++j) {
                if (row[static_cast<std::size_t>(j)] != value) {
                    constant = false;
                    break;
                }
            }
            if (constant) ++counts[w * bins + static_cast<std::size_t>(value - h.chi_min)];
        }
    }
    h.mass.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        h.mass[i] = static_cast<double>(counts[i]) / s.n_dirs;
    }
    return h;
}

DetectCurve detect_from_histogram(const SampHistogram& h) {
    if (h.window_len != 1) {
        throw ValidationError("detect_from_histogram requires window length 1, got " +
                              std::to_string(h.window_len));
    }
    if (h.sample_count < 1) throw ValidationError("detect_from_histogram on an empty histogram");
    if (static_cast<int>(h.windows.size()) != h.grid.m) {
        throw ValidationError("histogram windows do not tile the grid");
    }
    // window_len == 1 drops nothing, so each window's mass sums to 1 and the
    // weighted mean recovers the average curve value at that grid point.
    std::vector<double> avg(h.windows.size());
    for (std::size_t w = 0; w < h.windows.size(); ++w) {
        double total = 0.0;
        double weighted = 0.0;
        for (int chi = h.chi_min; chi <= h.chi_max; ++chi) {
            const double m = h.at(static_cast<int>(w), chi);
            total += m;
            weighted += m * chi;
        }
        if (!(total > 0.0)) {
            throw ValidationError("histogram window " + std::to_string(w) + " carries no mass");
        }
        avg[w] = weighted / total;
    }
    DetectCurve d{h.grid, std::vector<double>(static_cast<std::size_t>(h.grid.m), 0.0)};
    accumulate_centred_integral(avg.data(), h.grid, d.values.data());
    for (double& x : d.values) x *= kTau;
    return d;
}

}  // namespace eulershape
