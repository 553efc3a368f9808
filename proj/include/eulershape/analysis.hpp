#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eulershape/metric.hpp"

namespace eulershape {

/// Low-dimensional coordinates from classical MDS.
struct Embedding {
    int dims = 2;
    std::vector<double> coords;       // n x dims, row-major
    std::vector<double> eigenvalues;  // the dims eigenvalues used (clamped at 0)
    double stress = 0.0;              // Frobenius gap between input and embedded distances
};

/// k-medoids result. Every medoid belongs to its own cluster and cost is the
/// sum of distances from each point to its cluster medoid.
struct Clustering {
    std::vector<int> labels;
    std::vector<int> medoids;
    double cost = 0.0;
};

struct SilhouetteResult {
    double mean = 0.0;
    std::vector<double> scores;
};

struct KnnResult {
    double mean = 0.0;
    double sd = 0.0;
    std::vector<double> per_rep;  // one entry for leave-one-out
    std::vector<std::string> warnings;
};

/// Energy-distance profile along the depth axis: at each t, group members are
/// reweighted by a Gaussian kernel in depth and compared.
struct DepthKernelCurve {
    std::vector<double> t;
    double h = 0.1;
    std::vector<double> energy;
    std::vector<std::uint8_t> defined;  // 0 where a group had no usable weight
    std::vector<double> w_first;        // |t| x n normalized weights, row-major
    std::vector<double> w_second;
};

/// Dirichlet-smoothed composition ratios against the young-quadrant baseline.
struct EnrichmentTable {
    std::size_t quadrants = 0;
    std::size_t types = 0;
    double alpha = 1.0;
    std::vector<std::int64_t> counts;  // quadrants x types, row-major
    std::vector<double> ratios;        // E values, same shape

    double ratio(std::size_t q, std::size_t j) const { return ratios[q * types + j]; }
};

/// Classical (Torgerson) MDS: double-centre the squared distances, take the
/// top eigenpairs, clamp negative eigenvalues to zero. Errors when
/// n < dims + 1.
Embedding mds(const DistanceMatrix& m, int dims = 2);

/// PAM: greedy BUILD then best-improvement SWAP until a local optimum or
/// max_iter sweeps. The seed permutes candidate order, which fixes how cost
/// ties break; reruns with one seed are identical.
Clustering kmedoids(const DistanceMatrix& m, int k, std::uint64_t seed, int max_iter = 100);

/// Standard silhouette s(i) = (b - a) / max(a, b); singleton clusters score 0.
/// Errors unless there are >= 2 nonempty clusters.
SilhouetteResult silhouette(const DistanceMatrix& m, const std::vector<int>& labels);

/// Distance-matrix k-nearest-neighbour accuracy, leave-one-out protocol.
/// Classes with a single member are flagged in warnings but still evaluated.
KnnResult knn_eval_loo(const DistanceMatrix& m, const std::vector<int>& labels, int k = 1);

/// Stratified split protocol: per class, `ratio` of items train (at least one
/// on each side when the class allows it), repeated with derived seeds.
KnnResult knn_eval_split(const DistanceMatrix& m, const std::vector<int>& labels, int k,
                         double ratio, int reps, std::uint64_t seed);

/// group = 0 (first, the baseline group) or 1 (second) per item. depths in
/// [0,1]. t_grid empty means 51 evenly spaced points on [0,1].
DepthKernelCurve depth_energy_curve(const DistanceMatrix& m, const std::vector<double>& depths,
                                    const std::vector<int>& group, double h = 0.1,
                                    std::vector<double> t_grid = {});

/// counts is quadrants x types; young_rows index the baseline quadrants.
/// Errors on alpha <= 0, negative counts, or an empty baseline.
EnrichmentTable enrichment(const std::vector<std::vector<std::int64_t>>& counts,
                           const std::vector<int>& young_rows, double alpha = 1.0);

/// Best label permutation (exhaustive, k <= 8) mapping labels_b clusters onto
/// labels_a values, plus the proportional confusion matrix
/// entry(i, j) = #(a == i and b == j) / #(b == j).
struct ClusterMatch {
    std::vector<int> permutation;  // cluster j of labels_b maps to permutation[j]
    int agreement = 0;             // matched items under the permutation
    std::vector<double> confusion; // k x k row-major, rows = a values, cols = b clusters
};

ClusterMatch match_clusterings(const std::vector<int>& labels_a,
                               const std::vector<int>& labels_b, int k);

}  // namespace eulershape
