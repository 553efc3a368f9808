#include "eulershape/complex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "eulershape/error.hpp"
#include "eulershape/io.hpp"

namespace eulershape {

namespace {

std::string tuple_text(std::span<const int> tuple) {
    std::string s = "(";
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(tuple[i]);
    }
    s += ')';
    return s;
}

}  // namespace

void GeometricComplex::add_simplex(std::vector<int> tuple) {
    if (tuple.size() < 2) {
        throw ValidationError("add_simplex expects dimension >= 1, got tuple " + tuple_text(tuple));
    }
    const std::size_t k = tuple.size() - 1;
    if (simplices.size() < k) simplices.resize(k);
    simplices[k - 1].push_back(std::move(tuple));
}

void validate(const GeometricComplex& k) {
    if (k.dim != 2) {
        throw ValidationError("ambient dimension must be 2, got " + std::to_string(k.dim));
    }
    const int nv = static_cast<int>(k.vertices.size());
    if (k.max_simplex_dim() > 2) {
        throw ValidationError("simplices of dimension > 2 are not supported");
    }
    std::vector<std::set<std::vector<int>>> seen(static_cast<std::size_t>(k.max_simplex_dim()));
    for (int d = 1; d <= k.max_simplex_dim(); ++d) {
        for (const auto& s : k.simplices_of_dim(d)) {
            if (static_cast<int>(s.size()) != d + 1) {
                throw ValidationError("simplex " + tuple_text(s) + " listed under dimension " +
                                      std::to_string(d));
            }
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (s[i] < 0 || s[i] >= nv) {
                    throw ValidationError("simplex " + tuple_text(s) +
                                          " references missing vertex " + std::to_string(s[i]));
                }
                if (i > 0 && s[i] <= s[i - 1]) {
                    throw ValidationError("simplex " + tuple_text(s) +
                                          " is not strictly increasing");
                }
            }
            if (!seen[static_cast<std::size_t>(d - 1)].insert(s).second) {
                throw ValidationError("duplicate simplex " + tuple_text(s));
            }
        }
    }
    // Closure: every facet of a d-simplex must itself be listed.
    for (int d = 2; d <= k.max_simplex_dim(); ++d) {
        const auto& faces = seen[static_cast<std::size_t>(d - 2)];
        for (const auto& s : k.simplices_of_dim(d)) {
            std::vector<int> face(s.size() - 1);
            for (std::size_t drop = 0; drop < s.size(); ++drop) {
                face.clear();
                for (std::size_t i = 0; i < s.size(); ++i) {
                    if (i != drop) face.push_back(s[i]);
                }
                if (!faces.count(face)) {
                    throw ValidationError("simplex " + tuple_text(s) + " is missing face " +
                                          tuple_text(face));
                }
            }
        }
    }
}

FlatComplex flatten(const GeometricComplex& k) {
    FlatComplex f;
    f.vertices = k.vertices;
    std::size_t cells = k.vertices.size();
    std::size_t vert_entries = k.vertices.size();
    for (int d = 1; d <= k.max_simplex_dim(); ++d) {
        cells += k.simplices_of_dim(d).size();
        vert_entries += k.simplices_of_dim(d).size() * static_cast<std::size_t>(d + 1);
    }
    f.cell_dim.reserve(cells);
    f.cell_offset.reserve(cells + 1);
    f.cell_verts.reserve(vert_entries);
    f.cell_offset.push_back(0);
    for (int v = 0; v < static_cast<int>(k.vertices.size()); ++v) {
        f.cell_dim.push_back(0);
        f.cell_verts.push_back(v);
        f.cell_offset.push_back(static_cast<int>(f.cell_verts.size()));
    }
    for (int d = 1; d <= k.max_simplex_dim(); ++d) {
        for (const auto& s : k.simplices_of_dim(d)) {
            f.cell_dim.push_back(static_cast<std::int8_t>(d));
            f.cell_verts.insert(f.cell_verts.end(), s.begin(), s.end());
            f.cell_offset.push_back(static_cast<int>(f.cell_verts.size()));
        }
    }
    return f;
}

FlatComplex flatten(const CubicalComplex& k) {
    // Compact corner ids into dense vertex indices, keeping sorted-id order so
    // tie-breaks by vertex index are reproducible.
    FlatComplex f;
    const int stride = k.width + 1;
    // Two id banks: lattice corners plus the split-corner copies above them.
    std::vector<int> dense(2 * static_cast<std::size_t>(stride) * (k.height + 1), -1);
    f.vertices.reserve(k.corners.size());
    for (std::size_t i = 0; i < k.corners.size(); ++i) {
        dense[static_cast<std::size_t>(k.corners[i])] = static_cast<int>(i);
        f.vertices.push_back(k.corner_coord(k.corners[i]));
    }
    auto vi = [&](int corner_id) {
        const int v = dense[static_cast<std::size_t>(corner_id)];
        if (v < 0) throw ValidationError("cubical complex edge or square references missing corner");
        return v;
    };
    f.cell_offset.push_back(0);
    for (int v = 0; v < static_cast<int>(f.vertices.size()); ++v) {
        f.cell_dim.push_back(0);
        f.cell_verts.push_back(v);
        f.cell_offset.push_back(static_cast<int>(f.cell_verts.size()));
    }
    for (const auto& e : k.edges) {
        f.cell_dim.push_back(1);
        f.cell_verts.push_back(vi(e[0]));
        f.cell_verts.push_back(vi(e[1]));
        f.cell_offset.push_back(static_cast<int>(f.cell_verts.size()));
    }
    if (k.square_corners.size() != k.squares.size()) {
        throw ValidationError("cubical complex squares lack their corner cells");
    }
    for (const auto& sq : k.square_corners) {
        f.cell_dim.push_back(2);
        for (int corner_id : sq) f.cell_verts.push_back(vi(corner_id));
        f.cell_offset.push_back(static_cast<int>(f.cell_verts.size()));
    }
    return f;
}

int euler_characteristic(const GeometricComplex& k) {
    long long chi = static_cast<long long>(k.vertices.size());
    int sign = -1;
    for (int d = 1; d <= k.max_simplex_dim(); ++d) {
        chi += sign * static_cast<long long>(k.simplices_of_dim(d).size());
        sign = -sign;
    }
    return static_cast<int>(chi);
}

int euler_characteristic(const CubicalComplex& k) {
    return static_cast<int>(static_cast<long long>(k.corners.size()) -
                            static_cast<long long>(k.edges.size()) +
                            static_cast<long long>(k.squares.size()));
}

int euler_characteristic(const FlatComplex& k) {
    long long chi = 0;
    for (std::int8_t d : k.cell_dim) chi += (d % 2 == 0) ? 1 : -1;
    return static_cast<int>(chi);
}

GeometricComplex center(const GeometricComplex& k) {
    if (k.vertices.empty()) throw ValidationError("cannot center an empty complex");
    Vec2 mean{0.0, 0.0};
    for (const Vec2& p : k.vertices) mean = mean + p;
    mean = mean * (1.0 / static_cast<double>(k.vertices.size()));
    GeometricComplex out = k;
    for (Vec2& p : out.vertices) p = p - mean;
    return out;
}

double bounding_radius(const GeometricComplex& k) {
    if (k.vertices.empty()) throw ValidationError("bounding radius of an empty complex");
    double r = 0.0;
    for (const Vec2& p : k.vertices) r = std::max(r, norm(p));
    return r;
}

double bounding_radius(const FlatComplex& k) {
    if (k.vertices.empty()) throw ValidationError("bounding radius of an empty complex");
    double r = 0.0;
    for (const Vec2& p : k.vertices) r = std::max(r, norm(p));
    return r;
}

GeometricComplex rotated(const GeometricComplex& k, double theta) {
    GeometricComplex out = k;
    for (Vec2& p : out.vertices) p = rotate(p, theta);
    return out;
}

namespace {

void check_unit_direction(Vec2 v) {
    if (std::abs(norm(v) - 1.0) > 1e-9) {
        throw ValidationError("direction must be a unit vector");
    }
}

/// Index of the height-maximal vertex of a cell, ties to the larger index.
/// Tuples are stored in increasing index order, so >= picks the later vertex.
int anchor_of(std::span<const int> tuple, const std::vector<double>& heights) {
    int best = tuple[0];
    for (std::size_t i = 1; i < tuple.size(); ++i) {
        if (heights[static_cast<std::size_t>(tuple[i])] >= heights[static_cast<std::size_t>(best)]) {
            best = tuple[i];
        }
    }
    return best;
}

}  // namespace

std::vector<LowerStar> lower_stars(const GeometricComplex& k, Vec2 v) {
    check_unit_direction(v);
    std::vector<double> heights(k.vertices.size());
    for (std::size_t i = 0; i < k.vertices.size(); ++i) heights[i] = dot(k.vertices[i], v);
    std::vector<LowerStar> stars(k.vertices.size());
    for (int i = 0; i < static_cast<int>(k.vertices.size()); ++i) {
        stars[static_cast<std::size_t>(i)].anchor_vertex = i;
        stars[static_cast<std::size_t>(i)].members.push_back({0, i});
        stars[static_cast<std::size_t>(i)].chi = 1;
    }
    for (int d = 1; d <= k.max_simplex_dim(); ++d) {
        const auto& list = k.simplices_of_dim(d);
        const int sign = (d % 2 == 0) ? 1 : -1;
        for (int s = 0; s < static_cast<int>(list.size()); ++s) {
            auto& star = stars[static_cast<std::size_t>(anchor_of(list[static_cast<std::size_t>(s)], heights))];
            star.members.push_back({d, s});
            star.chi += sign;
        }
    }
    return stars;
}

void lower_star_chi(const FlatComplex& k, Vec2 v,
                    std::vector<double>& heights, std::vector<int>& chi) {
    check_unit_direction(v);
    heights.assign(k.vertices.size(), 0.0);
    for (std::size_t i = 0; i < k.vertices.size(); ++i) heights[i] = dot(k.vertices[i], v);
    chi.assign(k.vertices.size(), 0);
    for (std::size_t c = 0; c < k.cell_count(); ++c) {
        const auto cell = k.cell(c);
        const int anchor = anchor_of(cell, heights);
        chi[static_cast<std::size_t>(anchor)] += (k.cell_dim[c] % 2 == 0) ? 1 : -1;
    }
}

GeometricComplex read_scx(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string word;
    int version = 0;
    if (!(in >> word >> version) || word != "scx" || version != 1) {
        throw ValidationError("not an scx v1 file: " + path);
    }
    GeometricComplex k;
    if (!(in >> word >> k.dim) || word != "dim") {
        throw ValidationError("scx file missing dim header: " + path);
    }
    std::size_t nv = 0;
    if (!(in >> word >> nv) || word != "vertices") {
        throw ValidationError("scx file missing vertices header: " + path);
    }
    k.vertices.resize(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        if (!(in >> k.vertices[i].x >> k.vertices[i].y)) {
            throw ValidationError("scx file truncated in vertex list: " + path);
        }
    }
    std::size_t ns = 0;
    if (!(in >> word >> ns) || word != "simplices") {
        throw ValidationError("scx file missing simplices header: " + path);
    }
    for (std::size_t i = 0; i < ns; ++i) {
        int d = 0;
        if (!(in >> d) || d < 1) {
            throw ValidationError("scx file has a bad simplex dimension: " + path);
        }
        std::vector<int> tuple(static_cast<std::size_t>(d) + 1);
        for (int& idx : tuple) {
            if (!(in >> idx)) {
                throw ValidationError("scx file truncated in simplex list: " + path);
            }
        }
        k.add_simplex(std::move(tuple));
    }
    validate(k);
    return k;
}

void write_scx(const std::string& path, const GeometricComplex& k) {
    validate(k);
    std::ostringstream out;
    out << "scx 1\n";
    out << "dim " << k.dim << "\n";
    out << "vertices " << k.vertices.size() << "\n";
    char buf[64];
    for (const Vec2& p : k.vertices) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
        out << buf;
    }
    std::size_t ns = 0;
    for (int d = 1; d <= k.max_simplex_dim(); ++d) ns += k.simplices_of_dim(d).size();
    out << "simplices " << ns << "\n";
    for (int d = 1; d <= k.max_simplex_dim(); ++d) {
        for (const auto& s : k.simplices_of_dim(d)) {
            out << d;
            for (int idx : s) out << ' ' << idx;
            out << "\n";
        }
    }
    atomic_write_text(path, out.str());
}

}  // namespace eulershape
