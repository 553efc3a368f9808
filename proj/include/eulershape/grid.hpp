#pragma once

#include <vector>

namespace eulershape {

/// Uniform filtration grid t_i = -a + 2a * i / (m - 1) over [-a, a].
/// Two curves are comparable only when their grids match exactly.
struct FiltrationGrid {
    double a = 1.5;
    int m = 2;

    double point(int i) const { return -a + 2.0 * a * i / (m - 1); }
    double step() const { return 2.0 * a / (m - 1); }
    std::vector<double> points() const {
        std::vector<double> t(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) t[static_cast<std::size_t>(i)] = point(i);
        return t;
    }
    bool operator==(const FiltrationGrid&) const = default;
};

/// Validating constructor: requires a > 0 and m >= 2.
FiltrationGrid make_grid(double a, int m);

/// Throws ValidationError unless the two grids match exactly.
void require_same_grid(const FiltrationGrid& lhs, const FiltrationGrid& rhs);

}  // namespace eulershape
