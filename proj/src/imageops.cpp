#include "eulershape/imageops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "eulershape/error.hpp"
#include "eulershape/io.hpp"

namespace eulershape {

namespace {

std::size_t pixel_count(const BinaryMask& m) {
    return static_cast<std::size_t>(m.width) * static_cast<std::size_t>(m.height);
}

void require_shape(const BinaryMask& m, const char* what) {
    if (m.width < 1 || m.height < 1) {
        throw ValidationError(std::string(what) + ": mask dimensions must be at least 1x1");
    }
    if (m.bits.size() != pixel_count(m)) {
        throw ValidationError(std::string(what) + ": mask bit count does not match dimensions");
    }
}

/// Labels foreground pixels under 4-connectivity; returns component count.
/// labels gets -1 on background, else a component id in scan order.
int label_components4(const BinaryMask& m, std::vector<int>& labels) {
    labels.assign(pixel_count(m), -1);
    int next = 0;
    std::vector<int> stack;
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * m.width + x;
            if (!m.bits[p] || labels[p] >= 0) continue;
            labels[p] = next;
            stack.assign(1, static_cast<int>(p));
            while (!stack.empty()) {
                const int q = stack.back();
                stack.pop_back();
                const int qx = q % m.width;
                const int qy = q / m.width;
                const int nx[4] = {qx - 1, qx + 1, qx, qx};
                const int ny[4] = {qy, qy, qy - 1, qy + 1};
                for (int k = 0; k < 4; ++k) {
                    if (nx[k] < 0 || nx[k] >= m.width || ny[k] < 0 || ny[k] >= m.height) continue;
                    const std::size_t r = static_cast<std::size_t>(ny[k]) * m.width + nx[k];
                    if (m.bits[r] && labels[r] < 0) {
                        labels[r] = next;
                        stack.push_back(static_cast<int>(r));
                    }
                }
            }
            ++next;
        }
    }
    return next;
}

BinaryMask dilate8(const BinaryMask& m) {
    BinaryMask out{m.width, m.height, m.pixel_pitch,
                   std::vector<std::uint8_t>(pixel_count(m), 0)};
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            if (!m.at(x, y)) continue;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (nx >= 0 && nx < m.width && ny >= 0 && ny < m.height) out.set(nx, ny, true);
                }
            }
        }
    }
    return out;
}

BinaryMask keep_largest4(const BinaryMask& m) {
    std::vector<int> labels;
    const int n = label_components4(m, labels);
    if (n <= 1) return m;
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(n), 0);
    for (int lab : labels) {
        if (lab >= 0) ++sizes[static_cast<std::size_t>(lab)];
    }
    // Ties go to the earliest component in scan order.
    const int keep = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    BinaryMask out = m;
    for (std::size_t p = 0; p < labels.size(); ++p) {
        out.bits[p] = labels[p] == keep ? 1 : 0;
    }
    return out;
}

/// Background flood fill from the border under 8-connectivity; any background
/// pixel the flood never reaches is inside some loop and becomes foreground.
BinaryMask fill_holes(const BinaryMask& m) {
    std::vector<std::uint8_t> outside(pixel_count(m), 0);
    std::vector<int> stack;
    auto push = [&](int x, int y) {
        if (x < 0 || x >= m.width || y < 0 || y >= m.height) return;
        const std::size_t p = static_cast<std::size_t>(y) * m.width + x;
        if (!m.bits[p] && !outside[p]) {
            outside[p] = 1;
            stack.push_back(static_cast<int>(p));
        }
    };
    for (int x = 0; x < m.width; ++x) {
        push(x, 0);
        push(x, m.height - 1);
    }
    for (int y = 0; y < m.height; ++y) {
        push(0, y);
        push(m.width - 1, y);
    }
    while (!stack.empty()) {
        const int q = stack.back();
        stack.pop_back();
        const int qx = q % m.width;
        const int qy = q / m.width;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) push(qx + dx, qy + dy);
        }
    }
    BinaryMask out = m;
    for (std::size_t p = 0; p < outside.size(); ++p) {
        if (!outside[p]) out.bits[p] = 1;
    }
    return out;
}

BinaryMask rescale_nn(const BinaryMask& m, double s) {
    const int nw = std::max(1, static_cast<int>(std::lround(m.width * s)));
    const int nh = std::max(1, static_cast<int>(std::lround(m.height * s)));
    BinaryMask out{nw, nh, m.pixel_pitch, std::vector<std::uint8_t>(
        static_cast<std::size_t>(nw) * static_cast<std::size_t>(nh), 0)};
    for (int y = 0; y < nh; ++y) {
        const int sy = std::clamp(static_cast<int>((y + 0.5) / s), 0, m.height - 1);
        for (int x = 0; x < nw; ++x) {
            const int sx = std::clamp(static_cast<int>((x + 0.5) / s), 0, m.width - 1);
            if (m.at(sx, sy)) out.set(x, y, true);
        }
    }
    return out;
}

/// 1D squared-distance transform by the lower envelope of parabolas.
void dt1d(const std::vector<double>& f, int n, std::vector<double>& d,
          std::vector<int>& v, std::vector<double>& z) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    // Infinite heights (rows with no target anywhere) never reach the lower
    // envelope, and mixing them into the intersection formula produces NaNs,
    // so they are skipped outright.
    int first = 0;
    while (first < n && f[static_cast<std::size_t>(first)] == kInf) ++first;
    if (first == n) {
        for (int q = 0; q < n; ++q) d[static_cast<std::size_t>(q)] = kInf;
        return;
    }
    int k = 0;
    v[0] = first;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = first + 1; q < n; ++q) {
        if (f[static_cast<std::size_t>(q)] == kInf) continue;
        double s;
        while (true) {
            const int p = v[static_cast<std::size_t>(k)];
            s = ((f[static_cast<std::size_t>(q)] + static_cast<double>(q) * q) -
                 (f[static_cast<std::size_t>(p)] + static_cast<double>(p) * p)) /
                (2.0 * q - 2.0 * p);
            if (s <= z[static_cast<std::size_t>(k)]) {
                --k;
            } else {
                break;
            }
        }
        ++k;
        v[static_cast<std::size_t>(k)] = q;
        z[static_cast<std::size_t>(k)] = s;
        z[static_cast<std::size_t>(k) + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[static_cast<std::size_t>(k) + 1] < q) ++k;
        const int p = v[static_cast<std::size_t>(k)];
        d[static_cast<std::size_t>(q)] =
            static_cast<double>(q - p) * (q - p) + f[static_cast<std::size_t>(p)];
    }
}

}  // namespace

std::int64_t BinaryMask::area() const {
    std::int64_t n = 0;
    for (std::uint8_t b : bits) n += b ? 1 : 0;
    return n;
}

BinaryMask read_mask(const std::string& path) {
    const auto dot = path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    if (ext == ".pgm") return read_pgm(path);
    if (ext == ".csv") return read_mask_csv(path);
    throw ValidationError("unknown mask format (want .pgm or .csv): " + path);
}

BinaryMask read_pgm(const std::string& path) {
    const std::string raw = read_text_file(path);
    std::size_t pos = 0;
    // Header tokens may be separated by whitespace and '#' comment lines.
    auto next_token = [&]() -> std::string {
        while (pos < raw.size()) {
            if (std::isspace(static_cast<unsigned char>(raw[pos]))) {
                ++pos;
            } else if (raw[pos] == '#') {
                while (pos < raw.size() && raw[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
        const std::size_t start = pos;
        while (pos < raw.size() && !std::isspace(static_cast<unsigned char>(raw[pos]))) ++pos;
        if (start == pos) throw ValidationError("truncated PGM header: " + path);
        return raw.substr(start, pos - start);
    };
    const std::string magic = next_token();
    if (magic != "P2" && magic != "P5") {
        throw ValidationError("unsupported PGM magic '" + magic + "' in " + path);
    }
    BinaryMask m;
    try {
        m.width = std::stoi(next_token());
        m.height = std::stoi(next_token());
    } catch (const std::exception&) {
        throw ValidationError("bad PGM dimensions in " + path);
    }
    const int maxval = std::stoi(next_token());
    if (m.width < 1 || m.height < 1 || maxval < 1 || maxval > 65535) {
        throw ValidationError("bad PGM header values in " + path);
    }
    m.bits.assign(pixel_count(m), 0);
    const int threshold = maxval / 2;
    if (magic == "P2") {
        for (std::size_t i = 0; i < m.bits.size(); ++i) {
            const int value = std::stoi(next_token());
            m.bits[i] = value > threshold ? 1 : 0;
        }
    } else {
        ++pos;  // exactly one whitespace byte after maxval
        const int bytes = maxval > 255 ? 2 : 1;
        if (raw.size() - pos < m.bits.size() * static_cast<std::size_t>(bytes)) {
            throw ValidationError("truncated PGM pixel data: " + path);
        }
        for (std::size_t i = 0; i < m.bits.size(); ++i) {
            int value = static_cast<unsigned char>(raw[pos++]);
            if (bytes == 2) value = value * 256 + static_cast<unsigned char>(raw[pos++]);
            m.bits[i] = value > threshold ? 1 : 0;
        }
    }
    return m;
}

void write_pgm(const std::string& path, const BinaryMask& mask) {
    require_shape(mask, "write_pgm");
    std::string out = "P5\n" + std::to_string(mask.width) + " " + std::to_string(mask.height) +
                      "\n255\n";
    out.reserve(out.size() + mask.bits.size());
    for (std::uint8_t b : mask.bits) out.push_back(b ? static_cast<char>(255) : '\0');
    atomic_write_text(path, out);
}

BinaryMask read_mask_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    BinaryMask m;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        int x = 0;
        while (std::getline(row, cell, ',')) {
            if (cell == "0") {
                m.bits.push_back(0);
            } else if (cell == "1") {
                m.bits.push_back(1);
            } else {
                throw ValidationError("mask CSV cell must be 0 or 1, got '" + cell + "' in " + path);
            }
            ++x;
        }
        if (m.height == 0) {
            m.width = x;
        } else if (x != m.width) {
            throw ValidationError("ragged mask CSV row in " + path);
        }
        ++m.height;
    }
    require_shape(m, "read_mask_csv");
    return m;
}

void write_mask_csv(const std::string& path, const BinaryMask& mask) {
    require_shape(mask, "write_mask_csv");
    std::string out;
    out.reserve(pixel_count(mask) * 2);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (x) out.push_back(',');
            out.push_back(mask.at(x, y) ? '1' : '0');
        }
        out.push_back('\n');
    }
    atomic_write_text(path, out);
}

BinaryMask preprocess_mask(const BinaryMask& mask, std::int64_t target_area, int out_size) {
    require_shape(mask, "preprocess_mask");
    if (target_area < 1) throw ValidationError("target area must be positive");
    if (out_size < 1) throw ValidationError("output size must be positive");
    if (mask.area() == 0) throw ValidationError("preprocess_mask: empty foreground");
    BinaryMask work = fill_holes(keep_largest4(dilate8(mask)));
    const double scale = std::sqrt(static_cast<double>(target_area) /
                                   static_cast<double>(work.area()));
    work = rescale_nn(work, scale);
    int x0 = work.width;
    int y0 = work.height;
    int x1 = -1;
    int y1 = -1;
    std::int64_t sum_x = 0;
    std::int64_t sum_y = 0;
    std::int64_t n = 0;
    for (int y = 0; y < work.height; ++y) {
        for (int x = 0; x < work.width; ++x) {
            if (!work.at(x, y)) continue;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
            sum_x += x;
            sum_y += y;
            ++n;
        }
    }
    if (n == 0) throw ValidationError("preprocess_mask: foreground vanished during rescale");
    if (x1 - x0 + 1 > out_size || y1 - y0 + 1 > out_size) {
        throw ValidationError("preprocess_mask: foreground " + std::to_string(x1 - x0 + 1) + "x" +
                              std::to_string(y1 - y0 + 1) + " exceeds output size " +
                              std::to_string(out_size));
    }
    const int cx = static_cast<int>(std::lround(static_cast<double>(sum_x) / n));
    const int cy = static_cast<int>(std::lround(static_cast<double>(sum_y) / n));
    // Shift the centroid to the canvas centre, clamped so the bounding box
    // stays inside the canvas.
    int dx = out_size / 2 - cx;
    int dy = out_size / 2 - cy;
    dx = std::clamp(dx, -x0, out_size - 1 - x1);
    dy = std::clamp(dy, -y0, out_size - 1 - y1);
    BinaryMask out{out_size, out_size, mask.pixel_pitch,
                   std::vector<std::uint8_t>(static_cast<std::size_t>(out_size) * out_size, 0)};
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            if (work.at(x, y)) out.set(x + dx, y + dy, true);
        }
    }
    return out;
}

std::vector<TileRect> tile_rects(const BinaryMask& mask, int side) {
    require_shape(mask, "tile");
    if (side < 1 || side > std::min(mask.width, mask.height)) {
        throw ValidationError("tile side must be in [1, min(width, height)]");
    }
    std::vector<TileRect> rects;
    for (int row = 0; (row + 1) * side <= mask.height; ++row) {
        for (int col = 0; (col + 1) * side <= mask.width; ++col) {
            rects.push_back({row, col, col * side, row * side, side});
        }
    }
    return rects;
}

BinaryMask crop(const BinaryMask& mask, const TileRect& rect) {
    if (rect.x0 < 0 || rect.y0 < 0 || rect.x0 + rect.side > mask.width ||
        rect.y0 + rect.side > mask.height) {
        throw ValidationError("tile rect outside the mask");
    }
    BinaryMask out{rect.side, rect.side, mask.pixel_pitch,
                   std::vector<std::uint8_t>(static_cast<std::size_t>(rect.side) * rect.side, 0)};
    for (int y = 0; y < rect.side; ++y) {
        for (int x = 0; x < rect.side; ++x) {
            if (mask.at(rect.x0 + x, rect.y0 + y)) out.set(x, y, true);
        }
    }
    return out;
}

std::vector<BinaryMask> tile(const BinaryMask& mask, int side) {
    std::vector<BinaryMask> tiles;
    for (const TileRect& rect : tile_rects(mask, side)) tiles.push_back(crop(mask, rect));
    return tiles;
}

BettiPair betti(const BinaryMask& mask) {
    require_shape(mask, "betti");
    std::vector<int> labels;
    const int b0 = label_components4(mask, labels);
    const int chi = euler_characteristic(mask_to_complex(mask));
    return {b0, b0 - chi};
}

CubicalComplex mask_to_complex(const BinaryMask& mask) {
    require_shape(mask, "mask_to_complex");
    CubicalComplex k;
    k.width = mask.width;
    k.height = mask.height;
    k.pixel_size = 1.0 / std::max(mask.width, mask.height);
    const int stride = mask.width + 1;
    const int bank = stride * (mask.height + 1);
    auto fg = [&](int x, int y) {
        return x >= 0 && x < mask.width && y >= 0 && y < mask.height && mask.at(x, y);
    };
    // The four pixels around lattice corner (cx, cy) form the cycle
    // a=(cx-1,cy-1) - b=(cx,cy-1) - d=(cx,cy) - c=(cx-1,cy) - a, neighbours
    // sharing an edge through the corner. A corner splits into two 0-cells
    // exactly when only one diagonal pair is foreground (a "pinch"): gluing
    // there would merge components that 4-connectivity keeps apart. The cell
    // holding the scan-order-first pixel keeps the lattice id; the other
    // moves to a second id bank.
    auto corner_cell = [&](int cx, int cy, int px, int py) {
        const bool a = fg(cx - 1, cy - 1), b = fg(cx, cy - 1);
        const bool c = fg(cx - 1, cy), d = fg(cx, cy);
        const int base = cy * stride + cx;
        if (a && d && !b && !c && px == cx && py == cy) return base + bank;
        if (b && c && !a && !d && px == cx - 1 && py == cy) return base + bank;
        return base;
    };
    for (int cy = 0; cy <= mask.height; ++cy) {
        for (int cx = 0; cx <= mask.width; ++cx) {
            const bool a = fg(cx - 1, cy - 1), b = fg(cx, cy - 1);
            const bool c = fg(cx - 1, cy), d = fg(cx, cy);
            if (!(a || b || c || d)) continue;
            k.corners.push_back(cy * stride + cx);
            if ((a && d && !b && !c) || (b && c && !a && !d)) {
                k.corners.push_back(cy * stride + cx + bank);
            }
        }
    }
    std::sort(k.corners.begin(), k.corners.end());
    // Horizontal sides between corners (x,cy)-(x+1,cy); any adjacent
    // foreground pixel works as the component witness because pixels sharing
    // the side are edge-connected at both endpoints.
    for (int cy = 0; cy <= mask.height; ++cy) {
        for (int x = 0; x < mask.width; ++x) {
            int wy = fg(x, cy) ? cy : cy - 1;
            if (!fg(x, wy)) continue;
            int lo = corner_cell(x, cy, x, wy);
            int hi = corner_cell(x + 1, cy, x, wy);
            k.edges.push_back({std::min(lo, hi), std::max(lo, hi)});
        }
    }
    for (int cx = 0; cx <= mask.width; ++cx) {
        for (int y = 0; y < mask.height; ++y) {
            int wx = fg(cx, y) ? cx : cx - 1;
            if (!fg(wx, y)) continue;
            int lo = corner_cell(cx, y, wx, y);
            int hi = corner_cell(cx, y + 1, wx, y);
            k.edges.push_back({std::min(lo, hi), std::max(lo, hi)});
        }
    }
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y)) continue;
            k.squares.push_back(y * mask.width + x);
            k.square_corners.push_back({corner_cell(x, y, x, y), corner_cell(x + 1, y, x, y),
                                        corner_cell(x, y + 1, x, y),
                                        corner_cell(x + 1, y + 1, x, y)});
        }
    }
    return k;
}

DepthField depth_field(const BinaryMask& region, const BinaryMask& target) {
    require_shape(region, "depth_field");
    require_shape(target, "depth_field");
    if (region.width != target.width || region.height != target.height) {
        throw ValidationError("depth_field: region and target dimensions differ");
    }
    if (target.area() == 0) throw ValidationError("depth_field: empty target");
    constexpr double kInf = std::numeric_limits<double>::infinity();
    const int w = target.width;
    const int h = target.height;
    std::vector<double> sq(pixel_count(target));
    for (std::size_t p = 0; p < sq.size(); ++p) sq[p] = target.bits[p] ? 0.0 : kInf;
    const int longest = std::max(w, h);
    std::vector<double> f(static_cast<std::size_t>(longest));
    std::vector<double> d(static_cast<std::size_t>(longest));
    std::vector<int> v(static_cast<std::size_t>(longest));
    std::vector<double> z(static_cast<std::size_t>(longest) + 1);
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[static_cast<std::size_t>(y)] = sq[static_cast<std::size_t>(y) * w + x];
        dt1d(f, h, d, v, z);
        for (int y = 0; y < h; ++y) sq[static_cast<std::size_t>(y) * w + x] = d[static_cast<std::size_t>(y)];
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[static_cast<std::size_t>(x)] = sq[static_cast<std::size_t>(y) * w + x];
        dt1d(f, w, d, v, z);
        for (int x = 0; x < w; ++x) sq[static_cast<std::size_t>(y) * w + x] = d[static_cast<std::size_t>(x)];
    }
    DepthField field{w, h, std::move(sq), region.bits};
    for (double& x : field.dist) x = std::sqrt(x);
    return field;
}

std::optional<double> quadrant_depth(const DepthField& field, const TileRect& rect) {
    if (rect.x0 < 0 || rect.y0 < 0 || rect.x0 + rect.side > field.width ||
        rect.y0 + rect.side > field.height) {
        throw ValidationError("tile rect outside the depth field");
    }
    double total = 0.0;
    std::int64_t n = 0;
    for (int y = rect.y0; y < rect.y0 + rect.side; ++y) {
        for (int x = rect.x0; x < rect.x0 + rect.side; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * field.width + x;
            if (field.region[p]) {
                total += field.dist[p];
                ++n;
            }
        }
    }
    if (n == 0) return std::nullopt;
    return total / static_cast<double>(n);
}

std::vector<double> normalized_depths(const std::vector<double>& tile_means) {
    double deepest = 0.0;
    for (double d : tile_means) {
        if (d < 0.0) throw ValidationError("tile depths must be nonnegative");
        deepest = std::max(deepest, d);
    }
    std::vector<double> out(tile_means.size(), 1.0);
    if (deepest > 0.0) {
        for (std::size_t i = 0; i < tile_means.size(); ++i) {
            out[i] = 1.0 - tile_means[i] / deepest;
        }
    }
    return out;
}

}  // namespace eulershape
