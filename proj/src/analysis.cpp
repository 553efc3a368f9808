#include "eulershape/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "eulershape/error.hpp"
#include "eulershape/rng.hpp"

namespace eulershape {

namespace {

void require_square(const DistanceMatrix& m) {
    const std::size_t n = m.ids.size();
    if (n < 1 || m.values.size() != n * n) {
        throw ValidationError("distance matrix shape does not match its ids");
    }
}

/// Highest label + 1, after checking labels are dense in [0, k).
int cluster_count(const std::vector<int>& labels) {
    int k = 0;
    for (int lab : labels) {
        if (lab < 0) throw ValidationError("labels must be nonnegative");
        k = std::max(k, lab + 1);
    }
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(k), 0);
    for (int lab : labels) ++sizes[static_cast<std::size_t>(lab)];
    for (int c = 0; c < k; ++c) {
        if (sizes[static_cast<std::size_t>(c)] == 0) {
            throw ValidationError("cluster " + std::to_string(c) + " is empty");
        }
    }
    return k;
}

double assignment_cost_of(const DistanceMatrix& m, const std::vector<int>& medoids,
                          std::vector<int>* labels_out) {
    const int n = m.n();
    double cost = 0.0;
    if (labels_out) labels_out->assign(static_cast<std::size_t>(n), 0);
    for (int p = 0; p < n; ++p) {
        double best = std::numeric_limits<double>::infinity();
        int best_c = 0;
        for (std::size_t c = 0; c < medoids.size(); ++c) {
            if (medoids[c] == p) {  // a medoid always joins its own cluster
                best = 0.0;
                best_c = static_cast<int>(c);
                break;
            }
            const double d = m.at(p, medoids[c]);
            if (d < best) {
                best = d;
                best_c = static_cast<int>(c);
            }
        }
        cost += best;
        if (labels_out) (*labels_out)[static_cast<std::size_t>(p)] = best_c;
    }
    return cost;
}

/// Majority vote over the k nearest train items; vote ties break by smaller
/// summed distance, then smaller label.
int knn_predict(const DistanceMatrix& m, const std::vector<int>& labels,
                const std::vector<int>& train, int query, int k) {
    std::vector<std::pair<double, int>> order;
    order.reserve(train.size());
    for (int t : train) order.push_back({m.at(query, t), t});
    const std::size_t take = std::min(static_cast<std::size_t>(k), order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                      order.end());
    int max_label = 0;
    for (int lab : labels) max_label = std::max(max_label, lab);
    std::vector<int> votes(static_cast<std::size_t>(max_label) + 1, 0);
    std::vector<double> dist_sum(static_cast<std::size_t>(max_label) + 1, 0.0);
    for (std::size_t i = 0; i < take; ++i) {
        const int lab = labels[static_cast<std::size_t>(order[i].second)];
        ++votes[static_cast<std::size_t>(lab)];
        dist_sum[static_cast<std::size_t>(lab)] += order[i].first;
    }
    int best = -1;
    for (int lab = 0; lab <= max_label; ++lab) {
        if (votes[static_cast<std::size_t>(lab)] == 0) continue;
        if (best < 0 || votes[static_cast<std::size_t>(lab)] > votes[static_cast<std::size_t>(best)] ||
            (votes[static_cast<std::size_t>(lab)] == votes[static_cast<std::size_t>(best)] &&
             dist_sum[static_cast<std::size_t>(lab)] < dist_sum[static_cast<std::size_t>(best)])) {
            best = lab;
        }
    }
    return best;
}

}  // namespace

Embedding mds(const DistanceMatrix& m, int dims) {
    require_square(m);
    const int n = m.n();
    if (dims < 1) throw ValidationError("mds needs at least one output dimension");
    if (n < dims + 1) {
        throw ValidationError("mds needs at least dims + 1 = " + std::to_string(dims + 1) +
                              " items, got " + std::to_string(n));
    }
    Eigen::MatrixXd sq(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double d = m.at(i, j);
            sq(i, j) = d * d;
        }
    }
    // B = -1/2 J sq J with J the centring projector.
    const Eigen::VectorXd row_mean = sq.rowwise().mean();
    const double total_mean = sq.mean();
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            b(i, j) = -0.5 * (sq(i, j) - row_mean(i) - row_mean(j) + total_mean);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
    if (solver.info() != Eigen::Success) throw ValidationError("mds eigendecomposition failed");
    Embedding out;
    out.dims = dims;
    out.coords.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(dims), 0.0);
    out.eigenvalues.resize(static_cast<std::size_t>(dims));
    for (int d = 0; d < dims; ++d) {
        // Eigenvalues come back ascending; take from the top.
        const int src = n - 1 - d;
        const double lambda = std::max(0.0, solver.eigenvalues()(src));
        out.eigenvalues[static_cast<std::size_t>(d)] = lambda;
        const double scale = std::sqrt(lambda);
        for (int i = 0; i < n; ++i) {
            out.coords[static_cast<std::size_t>(i) * dims + static_cast<std::size_t>(d)] =
                solver.eigenvectors()(i, src) * scale;
        }
    }
    double gap = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double embedded_sq = 0.0;
            for (int d = 0; d < dims; ++d) {
                const double delta = out.coords[static_cast<std::size_t>(i) * dims + d] -
                                     out.coords[static_cast<std::size_t>(j) * dims + d];
                embedded_sq += delta * delta;
            }
            const double diff = m.at(i, j) - std::sqrt(embedded_sq);
            gap += diff * diff;
        }
    }
    out.stress = std::sqrt(gap);
    return out;
}

Clustering kmedoids(const DistanceMatrix& m, int k, std::uint64_t seed, int max_iter) {
    require_square(m);
    const int n = m.n();
    if (k < 1 || k > n) {
        throw ValidationError("kmedoids needs 1 <= k <= n, got k=" + std::to_string(k) +
                              " with n=" + std::to_string(n));
    }
    // Seed-fixed candidate order; all cost ties resolve to the earliest
    // candidate in this permutation.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    CounterRng rng(seed);
    for (int i = n - 1; i > 0; --i) {
        std::swap(order[static_cast<std::size_t>(i)],
                  order[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i) + 1))]);
    }
    std::vector<int> medoids;
    std::vector<char> is_medoid(static_cast<std::size_t>(n), 0);
    // BUILD: greedily add the candidate that lowers the assignment cost most.
    for (int round = 0; round < k; ++round) {
        int best_c = -1;
        double best_cost = std::numeric_limits<double>::infinity();
        for (int cand : order) {
            if (is_medoid[static_cast<std::size_t>(cand)]) continue;
            medoids.push_back(cand);
            const double cost = assignment_cost_of(m, medoids, nullptr);
            medoids.pop_back();
            if (cost < best_cost) {
                best_cost = cost;
                best_c = cand;
            }
        }
        medoids.push_back(best_c);
        is_medoid[static_cast<std::size_t>(best_c)] = 1;
    }
    double cost = assignment_cost_of(m, medoids, nullptr);
    // SWAP: steepest-descent single swaps until no strict improvement.
    for (int iter = 0; iter < max_iter; ++iter) {
        int best_slot = -1;
        int best_cand = -1;
        double best_cost = cost;
        for (std::size_t slot = 0; slot < medoids.size(); ++slot) {
            const int saved = medoids[slot];
            for (int cand : order) {
                if (is_medoid[static_cast<std::size_t>(cand)]) continue;
                medoids[slot] = cand;
                const double trial = assignment_cost_of(m, medoids, nullptr);
                if (trial < best_cost) {
                    best_cost = trial;
                    best_slot = static_cast<int>(slot);
                    best_cand = cand;
                }
            }
            medoids[slot] = saved;
        }
        if (best_slot < 0) break;
        is_medoid[static_cast<std::size_t>(medoids[static_cast<std::size_t>(best_slot)])] = 0;
        medoids[static_cast<std::size_t>(best_slot)] = best_cand;
        is_medoid[static_cast<std::size_t>(best_cand)] = 1;
        cost = best_cost;
    }
    Clustering out;
    out.medoids = medoids;
    out.cost = assignment_cost_of(m, medoids, &out.labels);
    return out;
}

SilhouetteResult silhouette(const DistanceMatrix& m, const std::vector<int>& labels) {
    require_square(m);
    const std::size_t n = static_cast<std::size_t>(m.n());
    if (labels.size() != n) throw ValidationError("label count does not match the matrix");
    const int k = cluster_count(labels);
    if (k < 2) throw ValidationError("silhouette needs at least 2 clusters");
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(k), 0);
    for (int lab : labels) ++sizes[static_cast<std::size_t>(lab)];
    SilhouetteResult out;
    out.scores.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int own = labels[i];
        if (sizes[static_cast<std::size_t>(own)] == 1) {
            out.scores[i] = 0.0;
            continue;
        }
        std::vector<double> mean_to(static_cast<std::size_t>(k), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            mean_to[static_cast<std::size_t>(labels[j])] += m.at(static_cast<int>(i), static_cast<int>(j));
        }
        double a = 0.0;
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            const std::int64_t size = sizes[static_cast<std::size_t>(c)];
            if (c == own) {
                a = mean_to[static_cast<std::size_t>(c)] / static_cast<double>(size - 1);
            } else {
                b = std::min(b, mean_to[static_cast<std::size_t>(c)] / static_cast<double>(size));
            }
        }
        const double denom = std::max(a, b);
        out.scores[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
    out.mean = std::accumulate(out.scores.begin(), out.scores.end(), 0.0) /
               static_cast<double>(n);
    return out;
}

KnnResult knn_eval_loo(const DistanceMatrix& m, const std::vector<int>& labels, int k) {
    require_square(m);
    const std::size_t n = static_cast<std::size_t>(m.n());
    if (labels.size() != n) throw ValidationError("label count does not match the matrix");
    const int classes = cluster_count(labels);
    if (classes < 2) throw ValidationError("knn evaluation needs at least 2 classes");
    if (k < 1) throw ValidationError("knn needs k >= 1");
    KnnResult out;
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(classes), 0);
    for (int lab : labels) ++sizes[static_cast<std::size_t>(lab)];
    for (int c = 0; c < classes; ++c) {
        if (sizes[static_cast<std::size_t>(c)] < 2) {
            out.warnings.push_back("class " + std::to_string(c) +
                                   " has a single member; it can never be predicted correctly");
        }
    }
    std::int64_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<int> train;
        train.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) train.push_back(static_cast<int>(j));
        }
        if (knn_predict(m, labels, train, static_cast<int>(i), k) == labels[i]) ++correct;
    }
    out.mean = static_cast<double>(correct) / static_cast<double>(n);
    out.sd = 0.0;
    out.per_rep = {out.mean};
    return out;
}

KnnResult knn_eval_split(const DistanceMatrix& m, const std::vector<int>& labels, int k,
                         double ratio, int reps, std::uint64_t seed) {
    require_square(m);
    const std::size_t n = static_cast<std::size_t>(m.n());
    if (labels.size() != n) throw ValidationError("label count does not match the matrix");
    const int classes = cluster_count(labels);
    if (classes < 2) throw ValidationError("knn evaluation needs at least 2 classes");
    if (k < 1) throw ValidationError("knn needs k >= 1");
    if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("split ratio must be inside (0, 1)");
    if (reps < 1) throw ValidationError("split protocol needs at least one repetition");
    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(classes));
    for (std::size_t i = 0; i < n; ++i) {
        by_class[static_cast<std::size_t>(labels[i])].push_back(static_cast<int>(i));
    }
    KnnResult out;
    for (int rep = 0; rep < reps; ++rep) {
        CounterRng rng(CounterRng::derive(seed, static_cast<std::uint64_t>(rep)));
        std::vector<int> train;
        std::vector<int> test;
        for (auto members : by_class) {
            for (std::size_t i = members.size(); i > 1; --i) {
                std::swap(members[i - 1], members[rng.below(i)]);
            }
            // Keep at least one item per side whenever the class has two.
            std::size_t take = static_cast<std::size_t>(
                std::lround(ratio * static_cast<double>(members.size())));
            take = std::clamp<std::size_t>(take, 1, std::max<std::size_t>(members.size() - 1, 1));
            for (std::size_t i = 0; i < members.size(); ++i) {
                (i < take ? train : test).push_back(members[i]);
            }
        }
        if (test.empty()) throw ValidationError("split ratio leaves no test items");
        std::int64_t correct = 0;
        for (int q : test) {
            if (knn_predict(m, labels, train, q, k) == labels[static_cast<std::size_t>(q)]) {
                ++correct;
            }
        }
        out.per_rep.push_back(static_cast<double>(correct) / static_cast<double>(test.size()));
    }
    out.mean = std::accumulate(out.per_rep.begin(), out.per_rep.end(), 0.0) /
               static_cast<double>(reps);
    double var = 0.0;
    for (double a : out.per_rep) var += (a - out.mean) * (a - out.mean);
    out.sd = reps > 1 ? std::sqrt(var / static_cast<double>(reps - 1)) : 0.0;
    return out;
}

DepthKernelCurve depth_energy_curve(const DistanceMatrix& m, const std::vector<double>& depths,
                                    const std::vector<int>& group, double h,
                                    std::vector<double> t_grid) {
    require_square(m);
    const std::size_t n = static_cast<std::size_t>(m.n());
    if (depths.size() != n || group.size() != n) {
        throw ValidationError("depths and groups must match the matrix size");
    }
    for (double d : depths) {
        if (!(d >= 0.0 && d <= 1.0)) throw ValidationError("depths must lie in [0, 1]");
    }
    if (!(h > 0.0)) throw ValidationError("kernel bandwidth must be positive");
    bool has_first = false;
    bool has_second = false;
    for (int g : group) {
        if (g == 0) {
            has_first = true;
        } else if (g == 1) {
            has_second = true;
        } else {
            throw ValidationError("group labels must be 0 or 1");
        }
    }
    if (!has_first || !has_second) throw ValidationError("both groups must be nonempty");
    if (t_grid.empty()) {
        t_grid.resize(51);
        for (int i = 0; i < 51; ++i) t_grid[static_cast<std::size_t>(i)] = i / 50.0;
    }
    DepthKernelCurve out;
    out.t = std::move(t_grid);
    out.h = h;
    const std::size_t tn = out.t.size();
    out.energy.assign(tn, 0.0);
    out.defined.assign(tn, 0);
    out.w_first.assign(tn * n, 0.0);
    out.w_second.assign(tn * n, 0.0);
    for (std::size_t ti = 0; ti < tn; ++ti) {
        const double t = out.t[ti];
        double sum_first = 0.0;
        double sum_second = 0.0;
        std::vector<double> w(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double z = (depths[i] - t) / h;
            w[i] = std::exp(-0.5 * z * z);
            (group[i] == 0 ? sum_first : sum_second) += w[i];
        }
        if (!(sum_first > 0.0) || !(sum_second > 0.0)) continue;  // missing, not 0
        double* wf = out.w_first.data() + ti * n;
        double* ws = out.w_second.data() + ti * n;
        for (std::size_t i = 0; i < n; ++i) {
            if (group[i] == 0) {
                wf[i] = w[i] / sum_first;
            } else {
                ws[i] = w[i] / sum_second;
            }
        }
        out.energy[ti] = energy_distance(m, {wf, n}, {ws, n});
        out.defined[ti] = 1;
    }
    return out;
}

EnrichmentTable enrichment(const std::vector<std::vector<std::int64_t>>& counts,
                           const std::vector<int>& young_rows, double alpha) {
    if (!(alpha > 0.0)) throw ValidationError("smoothing constant alpha must be positive");
    if (counts.empty() || counts[0].empty()) throw ValidationError("enrichment needs counts");
    if (young_rows.empty()) throw ValidationError("enrichment needs a nonempty baseline");
    const std::size_t q_count = counts.size();
    const std::size_t j_count = counts[0].size();
    for (const auto& row : counts) {
        if (row.size() != j_count) throw ValidationError("count rows must share one length");
        for (std::int64_t c : row) {
            if (c < 0) throw ValidationError("counts must be nonnegative");
        }
    }
    std::vector<char> is_young(q_count, 0);
    for (int q : young_rows) {
        if (q < 0 || static_cast<std::size_t>(q) >= q_count) {
            throw ValidationError("baseline row index out of range");
        }
        is_young[static_cast<std::size_t>(q)] = 1;
    }
    EnrichmentTable out;
    out.quadrants = q_count;
    out.types = j_count;
    out.alpha = alpha;
    out.counts.reserve(q_count * j_count);
    for (const auto& row : counts) {
        out.counts.insert(out.counts.end(), row.begin(), row.end());
    }
    // Baseline composition over the pooled young quadrants.
    std::vector<double> baseline(j_count);
    std::int64_t young_total = 0;
    std::vector<std::int64_t> young_type(j_count, 0);
    for (std::size_t q = 0; q < q_count; ++q) {
        if (!is_young[q]) continue;
        for (std::size_t j = 0; j < j_count; ++j) {
            young_type[j] += counts[q][j];
            young_total += counts[q][j];
        }
    }
    const double young_denom = static_cast<double>(young_total) +
                               alpha * static_cast<double>(j_count);
    for (std::size_t j = 0; j < j_count; ++j) {
        baseline[j] = (static_cast<double>(young_type[j]) + alpha) / young_denom;
    }
    out.ratios.resize(q_count * j_count);
    for (std::size_t q = 0; q < q_count; ++q) {
        std::int64_t row_total = 0;
        for (std::size_t j = 0; j < j_count; ++j) row_total += counts[q][j];
        const double denom = static_cast<double>(row_total) + alpha * static_cast<double>(j_count);
        for (std::size_t j = 0; j < j_count; ++j) {
            const double r = (static_cast<double>(counts[q][j]) + alpha) / denom;
            out.ratios[q * j_count + j] = r / baseline[j];
        }
    }
    return out;
}

ClusterMatch match_clusterings(const std::vector<int>& labels_a,
                               const std::vector<int>& labels_b, int k) {
    if (labels_a.size() != labels_b.size()) {
        throw ValidationError("clusterings must label the same items");
    }
    if (labels_a.empty()) throw ValidationError("clusterings must be nonempty");
    if (k < 1) throw ValidationError("match_clusterings needs k >= 1");
    if (k > 8) {
        throw ValidationError("match_clusterings is exhaustive and limited to k <= 8, got " +
                              std::to_string(k));
    }
    const std::size_t kk = static_cast<std::size_t>(k);
    for (std::size_t i = 0; i < labels_a.size(); ++i) {
        if (labels_a[i] < 0 || labels_a[i] >= k || labels_b[i] < 0 || labels_b[i] >= k) {
            throw ValidationError("labels must lie in [0, k)");
        }
    }
    std::vector<std::int64_t> joint(kk * kk, 0);  // (a value, b cluster)
    std::vector<std::int64_t> b_size(kk, 0);
    for (std::size_t i = 0; i < labels_a.size(); ++i) {
        ++joint[static_cast<std::size_t>(labels_a[i]) * kk + static_cast<std::size_t>(labels_b[i])];
        ++b_size[static_cast<std::size_t>(labels_b[i])];
    }
    std::vector<int> perm(kk);
    std::iota(perm.begin(), perm.end(), 0);
    ClusterMatch out;
    out.permutation = perm;
    out.agreement = -1;
    // Lexicographic enumeration; strict > keeps the lexicographically first
    // permutation on agreement ties.
    do {
        std::int64_t agree = 0;
        for (std::size_t j = 0; j < kk; ++j) {
            agree += joint[static_cast<std::size_t>(perm[j]) * kk + j];
        }
        if (agree > out.agreement) {
            out.agreement = static_cast<int>(agree);
            out.permutation = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.confusion.assign(kk * kk, 0.0);
    for (std::size_t i = 0; i < kk; ++i) {
        for (std::size_t j = 0; j < kk; ++j) {
            if (b_size[j] > 0) {
                out.confusion[i * kk + j] = static_cast<double>(joint[i * kk + j]) /
                                            static_cast<double>(b_size[j]);
            }
        }
    }
    return out;
}

}  // namespace eulershape
