#include "eulershape/grid.hpp"

#include <string>

#include "eulershape/error.hpp"

namespace eulershape {

FiltrationGrid make_grid(double a, int m) {
    if (!(a > 0.0)) throw ValidationError("grid half-width must be positive, got " + std::to_string(a));
    if (m < 2) throw ValidationError("grid needs at least 2 points, got " + std::to_string(m));
    return {a, m};
}

void require_same_grid(const FiltrationGrid& lhs, const FiltrationGrid& rhs) {
    if (!(lhs == rhs)) {
        throw ValidationError("grid mismatch: [" + std::to_string(lhs.a) + ", m=" +
                              std::to_string(lhs.m) + "] vs [" + std::to_string(rhs.a) +
                              ", m=" + std::to_string(rhs.m) + "]");
    }
}

}  // namespace eulershape
