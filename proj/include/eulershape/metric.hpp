#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eulershape/grid.hpp"
#include "eulershape/transform.hpp"

namespace eulershape {

/// Trapezoid L1 distance between two curves on the same grid: interior
/// differences at full weight, endpoints at half weight, times the grid step.
double curve_l1(std::span<const std::int32_t> f, std::span<const std::int32_t> g,
                const FiltrationGrid& grid);
double curve_l1(std::span<const double> f, std::span<const double> g,
                const FiltrationGrid& grid);
double curve_l1(const EccCurve& f, const EccCurve& g);
double curve_l1(const DetectCurve& f, const DetectCurve& g);

/// Direction-averaged curve L1 between two fixed-direction transforms, scaled
/// by 2 pi. Requires matching grids and direction counts.
double ect_distance(const EctMatrix& a, const EctMatrix& b);

/// Exact Wasserstein-1 between two curve samples under the curve L1 ground
/// metric, by optimal assignment. Unequal sizes are handled by replicating
/// each sample to the least common multiple. Guards: each side at most 512
/// curves and the replicated size at most 1024; beyond that use
/// sliced_wasserstein.
double wasserstein_exact(const CurveMeasure& p, const CurveMeasure& q);

/// Sliced Wasserstein-1: average over random unit projections (Gaussian
/// normalised, seeded) of the exact 1D transport distance between projected
/// samples. Handles unequal sample sizes exactly in 1D.
double sliced_wasserstein(const CurveMeasure& p, const CurveMeasure& q, int n_slices,
                          std::uint64_t seed);

/// Symmetric matrix of pairwise distances with row identifiers.
struct DistanceMatrix {
    std::vector<std::string> ids;
    std::vector<double> values;  // n x n row-major

    int n() const { return static_cast<int>(ids.size()); }
    double at(int i, int j) const {
        return values[static_cast<std::size_t>(i) * ids.size() + static_cast<std::size_t>(j)];
    }
};

/// Energy distance between two weighted samples indexed into one distance
/// matrix: 2 * cross - within_first - within_second. Each weight vector must
/// be nonnegative and sum to 1 within 1e-9.
double energy_distance(const DistanceMatrix& m, std::span<const double> w_first,
                       std::span<const double> w_second);

/// Pairwise drivers. Pairs are computed in parallel; each entry depends only
/// on its own pair (sliced seeds derive from the pair index), so results are
/// identical for any worker count. ids may be empty (indices are used) or must
/// match the item count.
DistanceMatrix pairwise_wasserstein(const std::vector<CurveMeasure>& items,
                                    std::vector<std::string> ids = {});
DistanceMatrix pairwise_sliced(const std::vector<CurveMeasure>& items, int n_slices,
                               std::uint64_t seed, std::vector<std::string> ids = {});
DistanceMatrix pairwise_ect(const std::vector<EctMatrix>& items,
                            std::vector<std::string> ids = {});
DistanceMatrix pairwise_detect_l1(const std::vector<DetectCurve>& items,
                                  std::vector<std::string> ids = {});
/// Euclidean distance between flat feature vectors (histogram masses etc).
DistanceMatrix pairwise_l2(const std::vector<std::vector<double>>& items,
                           std::vector<std::string> ids = {});

}  // namespace eulershape
