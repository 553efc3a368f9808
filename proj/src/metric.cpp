#include "eulershape/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "eulershape/error.hpp"
#include "eulershape/parallel.hpp"
#include "eulershape/rng.hpp"

namespace eulershape {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

void require_same_length(std::size_t f, std::size_t g, const FiltrationGrid& grid) {
    if (f != static_cast<std::size_t>(grid.m) || g != static_cast<std::size_t>(grid.m)) {
        throw ValidationError("curve length does not match its grid");
    }
}

/// Exact total cost of the optimal assignment on a dense n x n cost matrix,
/// by shortest augmenting paths with dual potentials. O(n^3).
double assignment_cost(const std::vector<double>& cost, int n) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> match(static_cast<std::size_t>(n) + 1, 0);  // column -> row, 1-based
    std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
    std::vector<double> min_slack(static_cast<std::size_t>(n) + 1);
    std::vector<char> used(static_cast<std::size_t>(n) + 1);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::fill(min_slack.begin(), min_slack.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = match[static_cast<std::size_t>(j0)];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = cost[static_cast<std::size_t>(i0 - 1) * n + (j - 1)] -
                                   u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
                if (cur < min_slack[static_cast<std::size_t>(j)]) {
                    min_slack[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (min_slack[static_cast<std::size_t>(j)] < delta) {
                    delta = min_slack[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    min_slack[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }
    double total = 0.0;
    for (int j = 1; j <= n; ++j) {
        total += cost[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1) * n + (j - 1)];
    }
    return total;
}

/// W1 between two sorted 1D samples with uniform weights, integrating the
/// quantile gap. Breakpoints are tracked as integer multiples of
/// 1 / (|u| * |w|) so the merge is exact.
double w1_sorted_1d(const std::vector<double>& u, const std::vector<double>& w) {
    const std::int64_t nu = static_cast<std::int64_t>(u.size());
    const std::int64_t nw = static_cast<std::int64_t>(w.size());
    const double denom = static_cast<double>(nu * nw);
    std::int64_t i = 0;
    std::int64_t j = 0;
    std::int64_t q = 0;
    double total = 0.0;
    while (i < nu && j < nw) {
        const std::int64_t qu = (i + 1) * nw;
        const std::int64_t qw = (j + 1) * nu;
        const std::int64_t next = std::min(qu, qw);
        total += static_cast<double>(next - q) / denom *
                 std::abs(u[static_cast<std::size_t>(i)] - w[static_cast<std::size_t>(j)]);
        q = next;
        if (qu == next) ++i;
        if (qw == next) ++j;
    }
    return total;
}

template <class T>
double l1_core(std::span<const T> f, std::span<const T> g, const FiltrationGrid& grid) {
    require_same_length(f.size(), g.size(), grid);
    const std::size_t m = f.size();
    double interior = 0.0;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        interior += std::abs(static_cast<double>(f[i]) - static_cast<double>(g[i]));
    }
    const double ends = 0.5 * (std::abs(static_cast<double>(f[0]) - static_cast<double>(g[0])) +
                               std::abs(static_cast<double>(f[m - 1]) - static_cast<double>(g[m - 1])));
    return (interior + ends) * grid.step();
}

std::vector<std::string> resolve_ids(std::vector<std::string> ids, std::size_t n) {
    if (ids.empty()) {
        ids.reserve(n);
        for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
    } else if (ids.size() != n) {
        throw ValidationError("id count does not match item count");
    }
    return ids;
}

template <class F>
DistanceMatrix pairwise_impl(std::size_t n, std::vector<std::string> ids, F&& dist) {
    if (n < 2) throw ValidationError("pairwise distances need at least 2 items");
    DistanceMatrix dm;
    dm.ids = resolve_ids(std::move(ids), n);
    dm.values.assign(n * n, 0.0);
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (int i = 0; i < static_cast<int>(n); ++i) {
        for (int j = i + 1; j < static_cast<int>(n); ++j) pairs.push_back({i, j});
    }
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
    for (std::int64_t p = 0; p < static_cast<std::int64_t>(pairs.size()); ++p) {
        const auto [i, j] = pairs[static_cast<std::size_t>(p)];
        const double d = dist(i, j);
        dm.values[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)] = d;
        dm.values[static_cast<std::size_t>(j) * n + static_cast<std::size_t>(i)] = d;
    }
    return dm;
}

void require_uniform_grids(const std::vector<CurveMeasure>& items) {
    for (std::size_t i = 1; i < items.size(); ++i) {
        require_same_grid(items[0].grid, items[i].grid);
    }
}

}  // namespace

double curve_l1(std::span<const std::int32_t> f, std::span<const std::int32_t> g,
                const FiltrationGrid& grid) {
    require_same_length(f.size(), g.size(), grid);
    // Integer curves: accumulate exactly, convert once.
    long long interior = 0;
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
        interior += std::abs(static_cast<long long>(f[i]) - g[i]);
    }
    const long long ends = std::abs(static_cast<long long>(f[0]) - g[0]) +
                           std::abs(static_cast<long long>(f[f.size() - 1]) - g[g.size() - 1]);
    return (static_cast<double>(interior) + 0.5 * static_cast<double>(ends)) * grid.step();
}

double curve_l1(std::span<const double> f, std::span<const double> g,
                const FiltrationGrid& grid) {
    return l1_core(f, g, grid);
}

double curve_l1(const EccCurve& f, const EccCurve& g) {
    require_same_grid(f.grid, g.grid);
    return curve_l1(std::span<const std::int32_t>(f.values),
                    std::span<const std::int32_t>(g.values), f.grid);
}

double curve_l1(const DetectCurve& f, const DetectCurve& g) {
    require_same_grid(f.grid, g.grid);
    return curve_l1(std::span<const double>(f.values), std::span<const double>(g.values), f.grid);
}

double ect_distance(const EctMatrix& a, const EctMatrix& b) {
    require_same_grid(a.grid, b.grid);
    if (a.n_dirs != b.n_dirs) {
        throw ValidationError("ect distance needs matching direction counts, got " +
                              std::to_string(a.n_dirs) + " and " + std::to_string(b.n_dirs));
    }
    double total = 0.0;
    for (int i = 0; i < a.n_dirs; ++i) total += curve_l1(a.row(i), b.row(i), a.grid);
    return total / a.n_dirs * kTau;
}

double wasserstein_exact(const CurveMeasure& p, const CurveMeasure& q) {
    require_same_grid(p.grid, q.grid);
    const int np = p.n_dirs;
    const int nq = q.n_dirs;
    if (np < 1 || nq < 1) throw ValidationError("wasserstein_exact needs non-empty samples");
    if (np > 512 || nq > 512) {
        throw ValidationError("wasserstein_exact is limited to 512 curves per sample; "
                              "use sliced_wasserstein for larger samples");
    }
    const long long lcm = std::lcm(static_cast<long long>(np), static_cast<long long>(nq));
    if (lcm > 1024) {
        throw ValidationError("sample sizes " + std::to_string(np) + " and " + std::to_string(nq) +
                              " replicate to " + std::to_string(lcm) +
                              " curves, above the 1024 cap; use sliced_wasserstein");
    }
    const int L = static_cast<int>(lcm);
    std::vector<double> base(static_cast<std::size_t>(np) * static_cast<std::size_t>(nq));
    for (int i = 0; i < np; ++i) {
        for (int j = 0; j < nq; ++j) {
            base[static_cast<std::size_t>(i) * nq + j] = curve_l1(p.row(i), q.row(j), p.grid);
        }
    }
    double total = 0.0;
    if (L == np && L == nq) {
        total = assignment_cost(base, L);
    } else {
        // Replicate each sample to L curves with equal weight 1/L.
        const int rep_p = L / np;
        const int rep_q = L / nq;
        std::vector<double> cost(static_cast<std::size_t>(L) * static_cast<std::size_t>(L));
        for (int i = 0; i < L; ++i) {
            for (int j = 0; j < L; ++j) {
                cost[static_cast<std::size_t>(i) * L + j] =
                    base[static_cast<std::size_t>(i / rep_p) * nq + (j / rep_q)];
            }
        }
        total = assignment_cost(cost, L);
    }
    return total / L;
}

double sliced_wasserstein(const CurveMeasure& p, const CurveMeasure& q, int n_slices,
                          std::uint64_t seed) {
    require_same_grid(p.grid, q.grid);
    if (p.n_dirs < 1 || q.n_dirs < 1) {
        throw ValidationError("sliced_wasserstein needs non-empty samples");
    }
    if (n_slices < 1) throw ValidationError("sliced_wasserstein needs at least one slice");
    const int m = p.grid.m;
    std::vector<double> per_slice(static_cast<std::size_t>(n_slices));
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
    for (int s = 0; s < n_slices; ++s) {
        CounterRng rng(CounterRng::derive(seed, static_cast<std::uint64_t>(s)));
        std::vector<double> theta(static_cast<std::size_t>(m));
        double sq = 0.0;
        for (double& x : theta) {
            x = rng.gaussian();
            sq += x * x;
        }
        const double scale = sq > 0.0 ? 1.0 / std::sqrt(sq) : 0.0;
        for (double& x : theta) x *= scale;
        auto project = [&](const CurveMeasure& sample) {
            std::vector<double> out(static_cast<std::size_t>(sample.n_dirs));
            for (int i = 0; i < sample.n_dirs; ++i) {
                const auto row = sample.row(i);
                double acc = 0.0;
                for (int j = 0; j < m; ++j) acc += theta[static_cast<std::size_t>(j)] * row[static_cast<std::size_t>(j)];
                out[static_cast<std::size_t>(i)] = acc;
            }
            std::sort(out.begin(), out.end());
            return out;
        };
        per_slice[static_cast<std::size_t>(s)] = w1_sorted_1d(project(p), project(q));
    }
    // Fixed-order reduction keeps the result independent of the worker count.
    double total = 0.0;
    for (double d : per_slice) total += d;
    return total / n_slices;
}

double energy_distance(const DistanceMatrix& m, std::span<const double> w_first,
                       std::span<const double> w_second) {
    const std::size_t n = static_cast<std::size_t>(m.n());
    if (w_first.size() != n || w_second.size() != n) {
        throw ValidationError("energy distance weights must match the matrix size");
    }
    for (std::span<const double> w : {w_first, w_second}) {
        double sum = 0.0;
        for (double x : w) {
            if (x < 0.0) throw ValidationError("energy distance weights must be nonnegative");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw ValidationError("energy distance weights must sum to 1, got " + std::to_string(sum));
        }
    }
    double cross = 0.0;
    double within_first = 0.0;
    double within_second = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (w_first[i] == 0.0 && w_second[i] == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = m.values[i * n + j];
            cross += w_first[i] * w_second[j] * d;
            within_first += w_first[i] * w_first[j] * d;
            within_second += w_second[i] * w_second[j] * d;
        }
    }
    return 2.0 * cross - within_first - within_second;
}

DistanceMatrix pairwise_wasserstein(const std::vector<CurveMeasure>& items,
                                    std::vector<std::string> ids) {
    require_uniform_grids(items);
    return pairwise_impl(items.size(), std::move(ids), [&](int i, int j) {
        return wasserstein_exact(items[static_cast<std::size_t>(i)], items[static_cast<std::size_t>(j)]);
    });
}

DistanceMatrix pairwise_sliced(const std::vector<CurveMeasure>& items, int n_slices,
                               std::uint64_t seed, std::vector<std::string> ids) {
    require_uniform_grids(items);
    const std::uint64_t n = items.size();
    return pairwise_impl(items.size(), std::move(ids), [&, n](int i, int j) {
        const std::uint64_t pair_seed =
            CounterRng::derive(seed, static_cast<std::uint64_t>(i) * n + static_cast<std::uint64_t>(j));
        return sliced_wasserstein(items[static_cast<std::size_t>(i)],
                                  items[static_cast<std::size_t>(j)], n_slices, pair_seed);
    });
}

DistanceMatrix pairwise_ect(const std::vector<EctMatrix>& items, std::vector<std::string> ids) {
    return pairwise_impl(items.size(), std::move(ids), [&](int i, int j) {
        return ect_distance(items[static_cast<std::size_t>(i)], items[static_cast<std::size_t>(j)]);
    });
}

DistanceMatrix pairwise_detect_l1(const std::vector<DetectCurve>& items,
                                  std::vector<std::string> ids) {
    return pairwise_impl(items.size(), std::move(ids), [&](int i, int j) {
        return curve_l1(items[static_cast<std::size_t>(i)], items[static_cast<std::size_t>(j)]);
    });
}

DistanceMatrix pairwise_l2(const std::vector<std::vector<double>>& items,
                           std::vector<std::string> ids) {
    for (std::size_t i = 1; i < items.size(); ++i) {
        if (items[i].size() != items[0].size()) {
            throw ValidationError("feature vectors must share one length");
        }
    }
    return pairwise_impl(items.size(), std::move(ids), [&](int i, int j) {
        const auto& f = items[static_cast<std::size_t>(i)];
        const auto& g = items[static_cast<std::size_t>(j)];
        double sq = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) {
            const double d = f[k] - g[k];
            sq += d * d;
        }
        return std::sqrt(sq);
    });
}

}  // namespace eulershape
