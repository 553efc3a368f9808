#include "eulershape/reference.hpp"

namespace eulershape {

std::int32_t brute_force_chi_at(const FlatComplex& k, Vec2 v, double t) {
    std::int32_t chi = 0;
    for (std::size_t c = 0; c < k.cell_count(); ++c) {
        bool inside = true;
        for (int vertex : k.cell(c)) {
            if (dot(k.vertices[static_cast<std::size_t>(vertex)], v) > t) {
                inside = false;
                break;
            }
        }
        if (inside) chi += (k.cell_dim[c] % 2 == 0) ? 1 : -1;
    }
    return chi;
}

std::vector<std::int32_t> brute_force_ecc(const FlatComplex& k, Vec2 v,
                                          const FiltrationGrid& grid) {
    std::vector<std::int32_t> curve(static_cast<std::size_t>(grid.m));
    for (int i = 0; i < grid.m; ++i) {
        curve[static_cast<std::size_t>(i)] = brute_force_chi_at(k, v, grid.point(i));
    }
    return curve;
}

}  // namespace eulershape
