#include "eulershape/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "eulershape/error.hpp"

namespace eulershape {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

std::vector<std::string> nonempty_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

double parse_double(const std::string& cell, const std::string& path) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw IoError("bad numeric cell '" + cell + "' in " + path);
    }
}

long long parse_int(const std::string& cell, const std::string& path) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw IoError("bad integer cell '" + cell + "' in " + path);
    }
}

nlohmann::json read_sidecar(const std::string& csv_path) {
    const std::string path = sidecar_path(csv_path);
    try {
        return nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad sidecar JSON " + path + ": " + e.what());
    }
}

void write_sidecar(const std::string& csv_path, const nlohmann::json& j) {
    atomic_write_text(sidecar_path(csv_path), j.dump(2) + "\n");
}

void write_curve_rows(std::string& out, const std::int32_t* values, int rows, int cols) {
    for (int i = 0; i < rows; ++i) {
        const std::int32_t* row = values + static_cast<std::size_t>(i) * static_cast<std::size_t>(cols);
        for (int j = 0; j < cols; ++j) {
            if (j) out.push_back(',');
            out += std::to_string(row[j]);
        }
        out.push_back('\n');
    }
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path);
    return buf.str();
}

void atomic_write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename failed for " + path + ": " + ec.message());
}

std::string content_digest(const std::string& content) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : content) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sidecar_path(const std::string& csv_path) {
    const auto dot = csv_path.rfind('.');
    const auto slash = csv_path.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return csv_path + ".json";
    }
    return csv_path.substr(0, dot) + ".json";
}

void write_distance_csv(const std::string& path, const DistanceMatrix& m) {
    const std::size_t n = m.ids.size();
    if (n < 1 || m.values.size() != n * n) {
        throw ValidationError("distance matrix shape does not match its ids");
    }
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out.push_back(',');
        out += m.ids[i];
    }
    out.push_back('\n');
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j) out.push_back(',');
            out += format_double(m.values[i * n + j]);
        }
        out.push_back('\n');
    }
    atomic_write_text(path, out);
}

DistanceMatrix read_distance_csv(const std::string& path) {
    const auto lines = nonempty_lines(read_text_file(path));
    if (lines.empty()) throw IoError("empty distance CSV: " + path);
    DistanceMatrix m;
    m.ids = split_csv_line(lines[0]);
    const std::size_t n = m.ids.size();
    if (lines.size() != n + 1) {
        throw IoError("distance CSV row count does not match its ids: " + path);
    }
    m.values.reserve(n * n);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_csv_line(lines[i]);
        if (cells.size() != n) throw IoError("ragged distance CSV row in " + path);
        for (const auto& cell : cells) m.values.push_back(parse_double(cell, path));
    }
    return m;
}

void write_ect_csv(const std::string& csv_path, const EctMatrix& m) {
    std::string out;
    write_curve_rows(out, m.values.data(), m.n_dirs, m.grid.m);
    atomic_write_text(csv_path, out);
    write_sidecar(csv_path, {{"kind", "curves"},
                             {"mode", "fixed"},
                             {"seed", 0},
                             {"a", m.grid.a},
                             {"m", m.grid.m},
                             {"n_dirs", m.n_dirs}});
}

void write_sample_csv(const std::string& csv_path, const CurveMeasure& s) {
    std::string out;
    write_curve_rows(out, s.values.data(), s.n_dirs, s.grid.m);
    atomic_write_text(csv_path, out);
    write_sidecar(csv_path, {{"kind", "curves"},
                             {"mode", "random"},
                             {"seed", s.seed},
                             {"a", s.grid.a},
                             {"m", s.grid.m},
                             {"n_dirs", s.n_dirs}});
}

CurveFile read_curves_csv(const std::string& csv_path) {
    const nlohmann::json meta = read_sidecar(csv_path);
    CurveFile file;
    FiltrationGrid grid;
    int n_dirs = 0;
    std::string mode;
    try {
        if (meta.at("kind") != "curves") {
            throw IoError(csv_path + " sidecar is not a curves file");
        }
        mode = meta.at("mode");
        grid = make_grid(meta.at("a"), meta.at("m"));
        n_dirs = meta.at("n_dirs");
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad curves sidecar for " + csv_path + ": " + e.what());
    }
    if (mode != "fixed" && mode != "random") {
        throw IoError("unknown curves mode '" + mode + "' for " + csv_path);
    }
    const auto lines = nonempty_lines(read_text_file(csv_path));
    if (static_cast<int>(lines.size()) != n_dirs) {
        throw IoError("curve CSV row count does not match its sidecar: " + csv_path);
    }
    std::vector<std::int32_t> values;
    values.reserve(static_cast<std::size_t>(n_dirs) * static_cast<std::size_t>(grid.m));
    for (const auto& line : lines) {
        const auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != grid.m) {
            throw IoError("ragged curve CSV row in " + csv_path);
        }
        for (const auto& cell : cells) {
            values.push_back(static_cast<std::int32_t>(parse_int(cell, csv_path)));
        }
    }
    file.fixed = mode == "fixed";
    if (file.fixed) {
        file.ect = {grid, n_dirs, std::move(values)};
    } else {
        file.sample = {grid, meta.at("seed").get<std::uint64_t>(), n_dirs, std::move(values)};
    }
    return file;
}

void write_histogram_csv(const std::string& csv_path, const SampHistogram& h) {
    std::string out = "start,end";
    for (int chi = h.chi_min; chi <= h.chi_max; ++chi) {
        out.push_back(',');
        out += std::to_string(chi);
    }
    out.push_back('\n');
    for (std::size_t w = 0; w < h.windows.size(); ++w) {
        out += std::to_string(h.windows[w][0]);
        out.push_back(',');
        out += std::to_string(h.windows[w][1]);
        for (int b = 0; b < h.bins(); ++b) {
            out.push_back(',');
            out += format_double(h.mass[w * static_cast<std::size_t>(h.bins()) +
                                        static_cast<std::size_t>(b)]);
        }
        out.push_back('\n');
    }
    atomic_write_text(csv_path, out);
    write_sidecar(csv_path, {{"kind", "histogram"},
                             {"a", h.grid.a},
                             {"m", h.grid.m},
                             {"windowLen", h.window_len},
                             {"sampleCount", h.sample_count},
                             {"chiMin", h.chi_min},
                             {"chiMax", h.chi_max},
                             {"rangeExpanded", h.range_expanded}});
}

SampHistogram read_histogram_csv(const std::string& csv_path) {
    const nlohmann::json meta = read_sidecar(csv_path);
    SampHistogram h;
    try {
        if (meta.at("kind") != "histogram") {
            throw IoError(csv_path + " sidecar is not a histogram file");
        }
        h.grid = make_grid(meta.at("a"), meta.at("m"));
        h.window_len = meta.at("windowLen");
        h.sample_count = meta.at("sampleCount");
        h.chi_min = meta.at("chiMin");
        h.chi_max = meta.at("chiMax");
        h.range_expanded = meta.at("rangeExpanded");
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad histogram sidecar for " + csv_path + ": " + e.what());
    }
    if (h.chi_max < h.chi_min) throw IoError("inverted chi range in " + csv_path);
    const auto lines = nonempty_lines(read_text_file(csv_path));
    if (lines.size() < 2) throw IoError("histogram CSV has no windows: " + csv_path);
    const std::size_t bins = static_cast<std::size_t>(h.bins());
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_csv_line(lines[i]);
        if (cells.size() != bins + 2) throw IoError("ragged histogram row in " + csv_path);
        h.windows.push_back({static_cast<int>(parse_int(cells[0], csv_path)),
                             static_cast<int>(parse_int(cells[1], csv_path))});
        for (std::size_t b = 0; b < bins; ++b) {
            h.mass.push_back(parse_double(cells[b + 2], csv_path));
        }
    }
    return h;
}

void write_detect_csv(const std::string& csv_path, const DetectCurve& d) {
    std::string out;
    for (int i = 0; i < d.grid.m; ++i) {
        out += format_double(d.grid.point(i));
        out.push_back(',');
        out += format_double(d.values[static_cast<std::size_t>(i)]);
        out.push_back('\n');
    }
    atomic_write_text(csv_path, out);
    write_sidecar(csv_path, {{"kind", "detect"}, {"a", d.grid.a}, {"m", d.grid.m}});
}

DetectCurve read_detect_csv(const std::string& csv_path) {
    const nlohmann::json meta = read_sidecar(csv_path);
    DetectCurve d;
    try {
        if (meta.at("kind") != "detect") {
            throw IoError(csv_path + " sidecar is not a detect file");
        }
        d.grid = make_grid(meta.at("a"), meta.at("m"));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad detect sidecar for " + csv_path + ": " + e.what());
    }
    const auto lines = nonempty_lines(read_text_file(csv_path));
    if (static_cast<int>(lines.size()) != d.grid.m) {
        throw IoError("detect CSV row count does not match its sidecar: " + csv_path);
    }
    for (const auto& line : lines) {
        const auto cells = split_csv_line(line);
        if (cells.size() != 2) throw IoError("detect CSV rows are t,value pairs: " + csv_path);
        d.values.push_back(parse_double(cells[1], csv_path));
    }
    return d;
}

}  // namespace eulershape
