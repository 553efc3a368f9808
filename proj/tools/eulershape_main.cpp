// Batch command-line surface over the eulershape library: generate,
// preprocess, transform, compare, analyze. Every command writes its outputs
// atomically and drops a run.json next to them recording the command, the
// parameters, and a content digest of every input, so a run can be audited
// and replayed. Reruns with the same arguments produce byte-identical files.

#include <fnmatch.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eulershape/analysis.hpp"
#include "eulershape/complex.hpp"
#include "eulershape/error.hpp"
#include "eulershape/imageops.hpp"
#include "eulershape/io.hpp"
#include "eulershape/metric.hpp"
#include "eulershape/parallel.hpp"
#include "eulershape/rng.hpp"
#include "eulershape/synth.hpp"
#include "eulershape/transform.hpp"

namespace fs = std::filesystem;

using namespace eulershape;

namespace {

/// A batch where some items failed; per-item messages are already printed.
struct BatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

std::string ext_of(const std::string& path) {
    std::string e = fs::path(path).extension().string();
    std::transform(e.begin(), e.end(), e.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return e;
}

/// Literal paths pass through; anything with a wildcard is matched against
/// its parent directory. Matches are sorted so batch order never depends on
/// directory enumeration order.
std::vector<std::string> expand_inputs(const std::vector<std::string>& args) {
    std::vector<std::string> paths;
    for (const auto& arg : args) {
        if (arg.find_first_of("*?[") == std::string::npos) {
            paths.push_back(arg);
            continue;
        }
        const fs::path pattern(arg);
        const fs::path dir = pattern.parent_path().empty() ? fs::path(".") : pattern.parent_path();
        std::vector<std::string> hits;
        std::error_code ec;
        for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
            if (!it->is_regular_file()) continue;
            const std::string name = it->path().filename().string();
            if (fnmatch(pattern.filename().string().c_str(), name.c_str(), 0) == 0)
                hits.push_back((pattern.parent_path() / name).string());
        }
        if (hits.empty()) throw ValidationError("no inputs match '" + arg + "'");
        std::sort(hits.begin(), hits.end());
        paths.insert(paths.end(), hits.begin(), hits.end());
    }
    if (paths.empty()) throw ValidationError("at least one input is required");
    return paths;
}

/// Stems name the outputs, so two inputs must never share one.
void require_unique_stems(const std::vector<std::string>& paths) {
    std::set<std::string> seen;
    for (const auto& p : paths)
        if (!seen.insert(stem_of(p)).second)
            throw ValidationError("duplicate input stem '" + stem_of(p) + "'");
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

void ensure_parent(const std::string& file) {
    const fs::path parent = fs::path(file).parent_path();
    if (parent.empty()) return;
    std::error_code ec;
    fs::create_directories(parent, ec);
    if (ec) throw IoError("cannot create directory " + parent.string() + ": " + ec.message());
}

std::string indexed_name(const std::string& stem, int i, const std::string& suffix) {
    std::ostringstream s;
    s << stem << "_" << std::setw(3) << std::setfill('0') << i << suffix;
    return s.str();
}

nlohmann::json digest_inputs(const std::vector<std::string>& paths) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& p : paths)
        list.push_back({{"path", p}, {"digest", content_digest(read_text_file(p))}});
    return list;
}

/// Provenance record; written last, once every output exists. Holds no
/// timestamp so a rerun reproduces it byte for byte.
void write_run_json(const fs::path& path, const std::string& command,
                    nlohmann::json parameters, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs,
                    nlohmann::json result = nlohmann::json()) {
    nlohmann::json run{{"command", command},
                      {"parameters", std::move(parameters)},
                      {"inputs", digest_inputs(inputs)},
                      {"outputs", outputs}};
    if (!result.is_null()) run["result"] = std::move(result);
    atomic_write_text(path.string(), run.dump(2) + "\n");
}

fs::path run_json_for_dir(const std::string& out_dir) { return fs::path(out_dir) / "run.json"; }

fs::path run_json_for_file(const std::string& out_file) {
    return fs::path(out_file).replace_extension(".run.json");
}

/// Report collected per-item failures, then abort the batch. Partial
/// failures exit as validation errors; a batch where every item failed on
/// I/O keeps the I/O exit code.
void report_failures(const std::vector<std::string>& names,
                     const std::vector<std::string>& errors,
                     const std::vector<std::uint8_t>& io_failure) {
    int failed = 0;
    bool all_io = true;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (errors[i].empty()) continue;
        ++failed;
        if (!io_failure[i]) all_io = false;
        if (errors[i].find(names[i]) == std::string::npos) {
            std::cerr << "error: " << names[i] << ": " << errors[i] << "\n";
        } else {
            std::cerr << "error: " << errors[i] << "\n";
        }
    }
    if (failed == 0) return;
    const std::string summary =
        std::to_string(failed) + " of " + std::to_string(names.size()) + " items failed";
    if (failed == static_cast<int>(names.size()) && all_io) throw IoError(summary);
    throw BatchError(summary);
}

/// Run body(i) over every item, catching failures so they cannot escape the
/// parallel region. All failures are reported, then the batch errors out.
template <typename Body>
void for_each_item(const std::vector<std::string>& names, const Body& body) {
    const int n = static_cast<int>(names.size());
    std::vector<std::string> errors(names.size());
    std::vector<std::uint8_t> io_failure(names.size(), 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
#endif
    for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            body(i);
        } catch (const IoError& e) {
            errors[idx] = e.what();
            io_failure[idx] = 1;
        } catch (const std::exception& e) {
            errors[idx] = e.what();
        }
    }
    report_failures(names, errors, io_failure);
}

/// Serial per-item loader with the same all-or-nothing failure report.
template <typename T, typename Loader>
std::vector<T> load_all(const std::vector<std::string>& paths, const Loader& loader) {
    std::vector<T> items;
    items.reserve(paths.size());
    std::vector<std::string> errors(paths.size());
    std::vector<std::uint8_t> io_failure(paths.size(), 0);
    for (std::size_t i = 0; i < paths.size(); ++i) {
        try {
            items.push_back(loader(paths[i]));
        } catch (const IoError& e) {
            errors[i] = e.what();
            io_failure[i] = 1;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    report_failures(paths, errors, io_failure);
    return items;
}

struct LoadedShape {
    FlatComplex flat;
    double default_a = 0.0;
};

/// Complexes are centred before any transform so placement never leaks into
/// the descriptors; masks come out of mask_to_complex already centred with
/// the longest image side scaled to one world unit.
LoadedShape load_shape(const std::string& path) {
    const std::string ext = ext_of(path);
    if (ext == ".scx") {
        const GeometricComplex k = center(read_scx(path));
        LoadedShape s;
        s.flat = flatten(k);
        s.default_a = 1.1 * bounding_radius(s.flat);
        return s;
    }
    if (ext == ".pgm") return {flatten(mask_to_complex(read_pgm(path))), 1.5};
    throw ValidationError("transform inputs are .scx complexes or .pgm masks: " + path);
}

/// One grid for the whole batch, so the outputs stay mutually comparable.
/// Without --range the half-range is the widest per-shape default.
FiltrationGrid batch_grid(const std::vector<LoadedShape>& shapes, std::optional<double> range,
                          int points) {
    double a = 0.0;
    if (range) {
        a = *range;
    } else {
        for (const auto& s : shapes) a = std::max(a, s.default_a);
    }
    return make_grid(a, points);
}

CurveMeasure as_measure(CurveFile&& f) {
    if (!f.fixed) return std::move(f.sample);
    return CurveMeasure{f.ect.grid, 0, f.ect.n_dirs, std::move(f.ect.values)};
}

std::vector<std::string> stems_of(const std::vector<std::string>& paths) {
    std::vector<std::string> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(stem_of(p));
    return out;
}

// --- subcommands ---

void cmd_synth(const std::string& kind, const std::string& preset, bool rotate, int reps,
               std::uint64_t seed, const std::string& out_dir) {
    ensure_dir(out_dir);
    const std::string stem = stem_of(preset);
    std::vector<std::string> outputs;
    if (kind == "trees") {
        if (reps != 1)
            throw ValidationError(
                "--reps applies to ellipse presets; tree presets carry their own sample count");
        const TreeClassSpec spec = tree_spec_from_json(preset);
        const std::vector<GeometricComplex> samples = gen_trees(spec, rotate, seed);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const std::string dest =
                (fs::path(out_dir) / indexed_name(stem, static_cast<int>(i), ".scx")).string();
            write_scx(dest, samples[i]);
            outputs.push_back(dest);
        }
    } else {
        if (rotate) throw ValidationError("--rotate applies to tree presets");
        const EllipseFieldSpec spec = ellipse_spec_from_json(preset);
        for (int r = 0; r < reps; ++r) {
            const GeometricComplex field =
                gen_ellipse_field(spec, CounterRng::derive(seed, static_cast<std::uint64_t>(r)));
            const std::string dest = (fs::path(out_dir) / indexed_name(stem, r, ".scx")).string();
            write_scx(dest, field);
            outputs.push_back(dest);
        }
    }
    write_run_json(run_json_for_dir(out_dir), "synth",
                   {{"kind", kind},
                    {"preset", preset},
                    {"rotate", rotate},
                    {"reps", reps},
                    {"seed", seed},
                    {"out", out_dir}},
                   {preset}, outputs);
}

void cmd_preprocess(const std::vector<std::string>& inputs, std::int64_t area, int size,
                    const std::string& out_dir) {
    const std::vector<std::string> paths = expand_inputs(inputs);
    require_unique_stems(paths);
    ensure_dir(out_dir);
    std::vector<std::string> outputs(paths.size());
    for_each_item(paths, [&](int i) {
        const BinaryMask mask = read_mask(paths[static_cast<std::size_t>(i)]);
        const BinaryMask normalized = preprocess_mask(mask, area, size);
        const std::string dest =
            (fs::path(out_dir) / (stem_of(paths[static_cast<std::size_t>(i)]) + ".pgm")).string();
        write_pgm(dest, normalized);
        outputs[static_cast<std::size_t>(i)] = dest;
    });
    write_run_json(run_json_for_dir(out_dir), "preprocess",
                   {{"area", area}, {"size", size}, {"out", out_dir}}, paths, outputs);
}

void cmd_tile(const std::vector<std::string>& inputs, int side, const std::string& out_dir) {
    const std::vector<std::string> paths = expand_inputs(inputs);
    require_unique_stems(paths);
    ensure_dir(out_dir);
    std::vector<std::vector<std::string>> outputs(paths.size());
    for_each_item(paths, [&](int i) {
        const BinaryMask mask = read_mask(paths[static_cast<std::size_t>(i)]);
        const std::string stem = stem_of(paths[static_cast<std::size_t>(i)]);
        for (const TileRect& rect : tile_rects(mask, side)) {
            std::ostringstream name;
            name << stem << "_r" << rect.row << "_c" << rect.col << ".pgm";
            const std::string dest = (fs::path(out_dir) / name.str()).string();
            write_pgm(dest, crop(mask, rect));
            outputs[static_cast<std::size_t>(i)].push_back(dest);
        }
    });
    std::vector<std::string> flat;
    for (const auto& group : outputs) flat.insert(flat.end(), group.begin(), group.end());
    write_run_json(run_json_for_dir(out_dir), "tile", {{"side", side}, {"out", out_dir}}, paths,
                   flat);
}

void cmd_ect(const std::vector<std::string>& inputs, int dirs, int points,
             std::optional<double> range, const std::string& out_dir) {
    const std::vector<std::string> paths = expand_inputs(inputs);
    require_unique_stems(paths);
    const std::vector<LoadedShape> shapes = load_all<LoadedShape>(paths, load_shape);
    const FiltrationGrid grid = batch_grid(shapes, range, points);
    ensure_dir(out_dir);
    std::vector<std::string> outputs(paths.size());
    for_each_item(paths, [&](int i) {
        const EctMatrix m = ect(shapes[static_cast<std::size_t>(i)].flat, dirs, grid);
        const std::string dest =
            (fs::path(out_dir) / (stem_of(paths[static_cast<std::size_t>(i)]) + "_ect.csv"))
                .string();
        write_ect_csv(dest, m);
        outputs[static_cast<std::size_t>(i)] = dest;
    });
    write_run_json(run_json_for_dir(out_dir), "ect",
                   {{"dirs", dirs},
                    {"points", points},
                    {"range", range ? nlohmann::json(*range) : nlohmann::json()},
                    {"a", grid.a},
                    {"out", out_dir}},
                   paths, outputs);
}

void cmd_sampeuler(const std::vector<std::string>& inputs, int dirs, int points,
                   std::optional<double> range, std::uint64_t seed, const std::string& out_dir) {
    const std::vector<std::string> paths = expand_inputs(inputs);
    require_unique_stems(paths);
    const std::vector<LoadedShape> shapes = load_all<LoadedShape>(paths, load_shape);
    const FiltrationGrid grid = batch_grid(shapes, range, points);
    ensure_dir(out_dir);
    std::vector<std::string> outputs(paths.size());
    for_each_item(paths, [&](int i) {
        // Seeds derive from the item's batch position, never from thread ids.
        const std::uint64_t item_seed = CounterRng::derive(seed, static_cast<std::uint64_t>(i));
        const CurveMeasure s =
            sampeuler(shapes[static_cast<std::size_t>(i)].flat, dirs, grid, item_seed);
        const std::string dest =
            (fs::path(out_dir) / (stem_of(paths[static_cast<std::size_t>(i)]) + "_sample.csv"))
                .string();
        write_sample_csv(dest, s);
        outputs[static_cast<std::size_t>(i)] = dest;
    });
    write_run_json(run_json_for_dir(out_dir), "sampeuler",
                   {{"dirs", dirs},
                    {"points", points},
                    {"range", range ? nlohmann::json(*range) : nlohmann::json()},
                    {"a", grid.a},
                    {"seed", seed},
                    {"out", out_dir}},
                   paths, outputs);
}

void cmd_vectorize(const std::vector<std::string>& inputs, int window,
                   std::optional<std::pair<int, int>> chi_range, const std::string& out_dir) {
    const std::vector<std::string> paths = expand_inputs(inputs);
    require_unique_stems(paths);
    ensure_dir(out_dir);
    std::vector<std::string> outputs(paths.size());
    for_each_item(paths, [&](int i) {
        CurveFile file = read_curves_csv(paths[static_cast<std::size_t>(i)]);
        const SampHistogram h = vectorize(as_measure(std::move(file)), window, chi_range);
        const std::string dest =
            (fs::path(out_dir) / (stem_of(paths[static_cast<std::size_t>(i)]) + "_hist.csv"))
                .string();
        write_histogram_csv(dest, h);
        outputs[static_cast<std::size_t>(i)] = dest;
    });
    nlohmann::json params{{"window", window}, {"out", out_dir}};
    if (chi_range) {
        params["chi_min"] = chi_range->first;
        params["chi_max"] = chi_range->second;
    }
    write_run_json(run_json_for_dir(out_dir), "vectorize", std::move(params), paths, outputs);
}

void cmd_detect(const std::vector<std::string>& inputs, int dirs, int points,
                std::optional<double> range, bool grid_flags_set, const std::string& out_dir) {
    const std::vector<std::string> paths = expand_inputs(inputs);
    require_unique_stems(paths);
    std::vector<std::string> shape_paths;
    for (const auto& p : paths)
        if (ext_of(p) != ".csv") shape_paths.push_back(p);
    if (shape_paths.empty() && grid_flags_set)
        throw ValidationError("grid flags apply to complex or mask inputs; curve files carry "
                              "their own grid");
    // Shapes share one batch grid; curve files keep the grid they were
    // computed on.
    std::vector<LoadedShape> shapes;
    FiltrationGrid grid;
    if (!shape_paths.empty()) {
        shapes = load_all<LoadedShape>(shape_paths, load_shape);
        grid = batch_grid(shapes, range, points);
    }
    std::vector<std::size_t> shape_index(paths.size(), SIZE_MAX);
    for (std::size_t i = 0, next = 0; i < paths.size(); ++i)
        if (ext_of(paths[i]) != ".csv") shape_index[i] = next++;
    ensure_dir(out_dir);
    std::vector<std::string> outputs(paths.size());
    for_each_item(paths, [&](int i) {
        const std::size_t idx = static_cast<std::size_t>(i);
        DetectCurve d;
        if (shape_index[idx] != SIZE_MAX) {
            d = detect(shapes[shape_index[idx]].flat, dirs, grid);
        } else {
            CurveFile file = read_curves_csv(paths[idx]);
            d = file.fixed ? detect(file.ect) : detect(file.sample);
        }
        const std::string dest =
            (fs::path(out_dir) / (stem_of(paths[idx]) + "_detect.csv")).string();
        write_detect_csv(dest, d);
        outputs[idx] = dest;
    });
    write_run_json(run_json_for_dir(out_dir), "detect",
                   {{"dirs", dirs},
                    {"points", points},
                    {"range", range ? nlohmann::json(*range) : nlohmann::json()},
                    {"out", out_dir}},
                   paths, outputs);
}

void cmd_dist(const std::vector<std::string>& inputs, const std::string& metric, int slices,
              std::uint64_t seed, const std::string& out_file) {
    const std::vector<std::string> paths = expand_inputs(inputs);
    if (paths.size() < 2) throw ValidationError("dist needs at least two inputs");
    require_unique_stems(paths);
    const std::vector<std::string> ids = stems_of(paths);

    DistanceMatrix m;
    if (metric == "l1") {
        m = pairwise_detect_l1(load_all<DetectCurve>(paths, read_detect_csv), ids);
    } else if (metric == "ect") {
        const auto items = load_all<EctMatrix>(paths, [](const std::string& p) {
            CurveFile f = read_curves_csv(p);
            if (!f.fixed)
                throw ValidationError("--metric ect requires fixed-direction curve files");
            return std::move(f.ect);
        });
        m = pairwise_ect(items, ids);
    } else if (metric == "wexact" || metric == "sliced") {
        const auto items = load_all<CurveMeasure>(
            paths, [](const std::string& p) { return as_measure(read_curves_csv(p)); });
        m = metric == "wexact" ? pairwise_wasserstein(items, ids)
                               : pairwise_sliced(items, slices, seed, ids);
    } else {  // l2 over flattened histogram masses
        const auto items = load_all<SampHistogram>(paths, read_histogram_csv);
        for (const auto& h : items)
            if (h.grid != items[0].grid || h.window_len != items[0].window_len ||
                h.chi_min != items[0].chi_min || h.chi_max != items[0].chi_max)
                throw ValidationError(
                    "--metric l2 requires histograms sharing grid, window length, and chi bins");
        std::vector<std::vector<double>> features;
        features.reserve(items.size());
        for (const auto& h : items) features.push_back(h.mass);
        m = pairwise_l2(features, ids);
    }

    ensure_parent(out_file);
    if (paths.size() == 2) {
        atomic_write_text(out_file, "distance\n" + format_double(m.at(0, 1)) + "\n");
    } else {
        write_distance_csv(out_file, m);
    }
    nlohmann::json params{{"metric", metric}, {"out", out_file}};
    if (metric == "sliced") {
        params["slices"] = slices;
        params["seed"] = seed;
    }
    write_run_json(run_json_for_file(out_file), "dist", std::move(params), paths, {out_file});
}

void cmd_mds(const std::string& input, int dims, const std::string& out_file) {
    const DistanceMatrix m = read_distance_csv(input);
    const Embedding e = mds(m, dims);
    std::ostringstream csv;
    csv << "id";
    if (dims == 2) {
        csv << ",x,y";
    } else {
        for (int d = 0; d < dims; ++d) csv << ",c" << d;
    }
    csv << "\n";
    for (int i = 0; i < m.n(); ++i) {
        csv << m.ids[static_cast<std::size_t>(i)];
        for (int d = 0; d < dims; ++d)
            csv << "," << format_double(e.coords[static_cast<std::size_t>(i * dims + d)]);
        csv << "\n";
    }
    ensure_parent(out_file);
    atomic_write_text(out_file, csv.str());
    write_run_json(run_json_for_file(out_file), "mds", {{"dims", dims}, {"out", out_file}},
                   {input}, {out_file},
                   {{"stress", e.stress}, {"eigenvalues", e.eigenvalues}});
}

void cmd_cluster(const std::string& input, std::optional<int> k, bool sweep, std::uint64_t seed,
                 const std::string& out_file) {
    const DistanceMatrix m = read_distance_csv(input);
    ensure_parent(out_file);
    if (sweep) {
        const int k_max = std::min(10, m.n() - 1);
        if (k_max < 2) throw ValidationError("silhouette sweep needs at least three items");
        std::ostringstream csv;
        csv << "k,score\n";
        for (int kk = 2; kk <= k_max; ++kk) {
            const Clustering c = kmedoids(m, kk, seed);
            csv << kk << "," << format_double(silhouette(m, c.labels).mean) << "\n";
        }
        atomic_write_text(out_file, csv.str());
        write_run_json(run_json_for_file(out_file), "cluster",
                       {{"sweep", true}, {"seed", seed}, {"out", out_file}}, {input}, {out_file});
        return;
    }
    const Clustering c = kmedoids(m, *k, seed);
    std::ostringstream csv;
    csv << "id,label\n";
    for (int i = 0; i < m.n(); ++i)
        csv << m.ids[static_cast<std::size_t>(i)] << "," << c.labels[static_cast<std::size_t>(i)]
            << "\n";
    atomic_write_text(out_file, csv.str());
    nlohmann::json result{{"cost", c.cost}};
    nlohmann::json medoids = nlohmann::json::array();
    for (int idx : c.medoids) medoids.push_back(m.ids[static_cast<std::size_t>(idx)]);
    result["medoids"] = std::move(medoids);
    if (*k >= 2) result["silhouette"] = silhouette(m, c.labels).mean;
    write_run_json(run_json_for_file(out_file), "cluster",
                   {{"k", *k}, {"seed", seed}, {"out", out_file}}, {input}, {out_file},
                   std::move(result));
}

/// Header `id,label`; every matrix id must be present, extras are allowed so
/// one labels file can serve many subsets. Label strings become class codes
/// by sorted order.
std::vector<int> read_labels(const std::string& path, const std::vector<std::string>& ids) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "id,label")
        throw IoError("labels file must start with an id,label header: " + path);
    std::map<std::string, std::string> by_id;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || comma == 0 || comma + 1 >= line.size())
            throw IoError("malformed labels row '" + line + "' in " + path);
        by_id[line.substr(0, comma)] = line.substr(comma + 1);
    }
    std::set<std::string> classes;
    for (const auto& id : ids) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) throw ValidationError("no label for id '" + id + "' in " + path);
        classes.insert(it->second);
    }
    std::map<std::string, int> code;
    for (const auto& name : classes) code.emplace(name, static_cast<int>(code.size()));
    std::vector<int> labels;
    labels.reserve(ids.size());
    for (const auto& id : ids) labels.push_back(code.at(by_id.at(id)));
    return labels;
}

void cmd_eval(const std::string& input, const std::string& labels_path, int k,
              const std::string& protocol, double ratio, int reps, std::uint64_t seed,
              const std::string& out_file) {
    const DistanceMatrix m = read_distance_csv(input);
    const std::vector<int> labels = read_labels(labels_path, m.ids);
    const KnnResult r = protocol == "loo"
                            ? knn_eval_loo(m, labels, k)
                            : knn_eval_split(m, labels, k, ratio, reps, seed);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    ensure_parent(out_file);
    atomic_write_text(out_file,
                      "mean,sd\n" + format_double(r.mean) + "," + format_double(r.sd) + "\n");
    nlohmann::json params{{"labels", labels_path},
                          {"k", k},
                          {"protocol", protocol},
                          {"out", out_file}};
    if (protocol == "split") {
        params["ratio"] = ratio;
        params["reps"] = reps;
        params["seed"] = seed;
    }
    write_run_json(run_json_for_file(out_file), "eval", std::move(params), {input, labels_path},
                   {out_file},
                   {{"mean", r.mean}, {"sd", r.sd}, {"warnings", r.warnings}});
}

void cmd_depth(const std::string& region_path, const std::string& target_path, int side,
               const std::string& out_file) {
    const BinaryMask region = read_mask(region_path);
    const BinaryMask target = read_mask(target_path);
    const DepthField field = depth_field(region, target);
    const std::vector<TileRect> rects = tile_rects(region, side);
    if (rects.empty()) throw ValidationError("no full tiles fit the region mask");

    std::vector<std::optional<double>> means;
    means.reserve(rects.size());
    std::vector<double> defined;
    for (const TileRect& rect : rects) {
        means.push_back(quadrant_depth(field, rect));
        if (means.back()) defined.push_back(*means.back());
    }
    const std::vector<double> depths = normalized_depths(defined);

    // Tiles with no region pixels keep empty cells: missing, never zero.
    std::ostringstream csv;
    csv << "row,col,x0,y0,mean_distance,depth\n";
    std::size_t next = 0;
    int missing = 0;
    for (std::size_t i = 0; i < rects.size(); ++i) {
        csv << rects[i].row << "," << rects[i].col << "," << rects[i].x0 << "," << rects[i].y0
            << ",";
        if (means[i]) {
            csv << format_double(*means[i]) << "," << format_double(depths[next++]);
        } else {
            ++missing;
            csv << ",";
        }
        csv << "\n";
    }
    ensure_parent(out_file);
    atomic_write_text(out_file, csv.str());
    write_run_json(run_json_for_file(out_file), "depth", {{"side", side}, {"out", out_file}},
                   {region_path, target_path}, {out_file},
                   {{"tiles", rects.size()}, {"missing", missing}});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Euler characteristic transform toolkit", "eulershape"};
    app.require_subcommand(1);

    std::vector<std::string> inputs;
    std::string preset, kind, metric, protocol = "loo", labels_path, out;
    std::string region_path, target_path;
    bool rotate = false, sweep = false;
    int dirs = 100, points = 1000, slices = 50, window = 1, k = 1;
    int reps = 1, size = 1126, side = 200, dims = 2, eval_reps = 20;
    std::int64_t area = 0;
    double range = 0.0, ratio = 0.5;
    std::uint64_t seed = 0;

    auto* synth = app.add_subcommand("synth", "Generate synthetic complexes from a JSON preset");
    synth->add_option("--kind", kind, "Generator: trees or ellipses")
        ->required()
        ->check(CLI::IsMember({"trees", "ellipses"}));
    synth->add_option("--preset", preset, "Preset JSON file")->required();
    synth->add_flag("--rotate", rotate, "Random per-sample rotation (tree presets)");
    synth->add_option("--reps", reps, "Fields to generate (ellipse presets)");
    synth->add_option("--seed", seed, "RNG seed");
    synth->add_option("--out", out, "Output directory")->required();

    auto* preprocess =
        app.add_subcommand("preprocess", "Normalize masks: dilate, largest component, fill, "
                                         "rescale, center");
    preprocess->add_option("inputs", inputs, "Mask files (.pgm or 0/1 .csv)")->required();
    preprocess->add_option("--area", area, "Target foreground area in pixels")->required();
    preprocess->add_option("--size", size, "Output canvas side");
    preprocess->add_option("--out", out, "Output directory")->required();

    auto* tilecmd = app.add_subcommand("tile", "Cut masks into lattice tiles");
    tilecmd->add_option("inputs", inputs, "Mask files")->required();
    tilecmd->add_option("--side", side, "Tile side in pixels");
    tilecmd->add_option("--out", out, "Output directory")->required();

    auto* ectcmd = app.add_subcommand("ect", "Fixed-direction Euler characteristic transform");
    ectcmd->add_option("inputs", inputs, "Complexes (.scx) or masks (.pgm)")->required();
    ectcmd->add_option("--dirs", dirs, "Direction count");
    ectcmd->add_option("--points", points, "Grid points per curve");
    auto* ect_range = ectcmd->add_option("--range", range, "Grid half-range");
    ectcmd->add_option("--out", out, "Output directory")->required();

    auto* sampcmd = app.add_subcommand("sampeuler", "Random-direction curve sample");
    sampcmd->add_option("inputs", inputs, "Complexes (.scx) or masks (.pgm)")->required();
    sampcmd->add_option("--dirs", dirs, "Sampled direction count")->default_val(360);
    sampcmd->add_option("--points", points, "Grid points per curve")->default_val(300);
    auto* samp_range = sampcmd->add_option("--range", range, "Grid half-range");
    sampcmd->add_option("--seed", seed, "RNG seed; per item the seed derives from batch position");
    sampcmd->add_option("--out", out, "Output directory")->required();

    auto* veccmd = app.add_subcommand("vectorize", "Windowed histogram of a curve sample");
    veccmd->add_option("inputs", inputs, "Curve CSV files")->required();
    veccmd->add_option("--window", window, "Window length in grid steps")->required();
    int chi_min = 0, chi_max = 0;
    auto* chi_min_opt = veccmd->add_option("--chi-min", chi_min, "Histogram bin lower bound");
    auto* chi_max_opt = veccmd->add_option("--chi-max", chi_max, "Histogram bin upper bound");
    chi_min_opt->needs(chi_max_opt);
    chi_max_opt->needs(chi_min_opt);
    veccmd->add_option("--out", out, "Output directory")->required();

    auto* detcmd = app.add_subcommand("detect", "Rotation-invariant smoothed transform");
    detcmd->add_option("inputs", inputs, "Complexes, masks, or curve CSVs")->required();
    auto* det_dirs = detcmd->add_option("--dirs", dirs, "Direction count (shape inputs)");
    auto* det_points = detcmd->add_option("--points", points, "Grid points (shape inputs)");
    auto* det_range = detcmd->add_option("--range", range, "Grid half-range (shape inputs)");
    detcmd->add_option("--out", out, "Output directory")->required();

    auto* distcmd = app.add_subcommand("dist", "Pairwise distances between descriptor files");
    distcmd->add_option("inputs", inputs, "Descriptor files, all of one kind")->required();
    distcmd->add_option("--metric", metric,
                        "l1 (detect curves), ect (fixed curves), wexact or sliced (curve "
                        "samples), l2 (histograms)")
        ->required()
        ->check(CLI::IsMember({"l1", "ect", "wexact", "sliced", "l2"}));
    distcmd->add_option("--slices", slices, "Projection count for sliced");
    distcmd->add_option("--seed", seed, "Slice RNG seed");
    distcmd->add_option("--out", out, "Output CSV (scalar for two inputs, matrix beyond)")
        ->required();

    auto* mdscmd = app.add_subcommand("mds", "Classical MDS embedding of a distance matrix");
    mdscmd->add_option("input", preset, "Distance matrix CSV")->required();
    mdscmd->add_option("--dims", dims, "Embedding dimensions");
    mdscmd->add_option("--out", out, "Output CSV")->required();

    auto* clustercmd = app.add_subcommand("cluster", "k-medoids over a distance matrix");
    clustercmd->add_option("input", preset, "Distance matrix CSV")->required();
    auto* k_opt = clustercmd->add_option("--k", k, "Cluster count");
    auto* sweep_opt =
        clustercmd->add_flag("--sweep", sweep, "Silhouette sweep over k = 2..10 instead");
    k_opt->excludes(sweep_opt);
    sweep_opt->excludes(k_opt);
    clustercmd->add_option("--seed", seed, "Tie-break seed");
    clustercmd->add_option("--out", out, "Output CSV")->required();

    auto* evalcmd = app.add_subcommand("eval", "k-NN accuracy from a distance matrix");
    evalcmd->add_option("input", preset, "Distance matrix CSV")->required();
    evalcmd->add_option("--labels", labels_path, "Labels CSV (id,label)")->required();
    evalcmd->add_option("--k", k, "Neighbour count");
    evalcmd->add_option("--protocol", protocol, "loo or split")
        ->check(CLI::IsMember({"loo", "split"}));
    evalcmd->add_option("--ratio", ratio, "Training fraction (split)");
    evalcmd->add_option("--reps", eval_reps, "Repetitions (split)");
    evalcmd->add_option("--seed", seed, "Split RNG seed");
    evalcmd->add_option("--out", out, "Output CSV")->required();

    auto* depthcmd = app.add_subcommand("depth", "Tile depths of a region mask toward a target");
    depthcmd->add_option("region", region_path, "Region mask")->required();
    depthcmd->add_option("target", target_path, "Target mask (depth zero)")->required();
    depthcmd->add_option("--side", side, "Tile side in pixels");
    depthcmd->add_option("--out", out, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (synth->parsed()) {
            cmd_synth(kind, preset, rotate, reps, seed, out);
        } else if (preprocess->parsed()) {
            cmd_preprocess(inputs, area, size, out);
        } else if (tilecmd->parsed()) {
            cmd_tile(inputs, side, out);
        } else if (ectcmd->parsed()) {
            cmd_ect(inputs, dirs, points,
                    ect_range->count() ? std::optional<double>(range) : std::nullopt, out);
        } else if (sampcmd->parsed()) {
            cmd_sampeuler(inputs, dirs, points,
                          samp_range->count() ? std::optional<double>(range) : std::nullopt, seed,
                          out);
        } else if (veccmd->parsed()) {
            std::optional<std::pair<int, int>> chi_range;
            if (chi_min_opt->count()) chi_range = {chi_min, chi_max};
            cmd_vectorize(inputs, window, chi_range, out);
        } else if (detcmd->parsed()) {
            const bool grid_flags = det_dirs->count() || det_points->count() ||
                                    det_range->count();
            cmd_detect(inputs, dirs, points,
                       det_range->count() ? std::optional<double>(range) : std::nullopt,
                       grid_flags, out);
        } else if (distcmd->parsed()) {
            cmd_dist(inputs, metric, slices, seed, out);
        } else if (mdscmd->parsed()) {
            cmd_mds(preset, dims, out);
        } else if (clustercmd->parsed()) {
            if (!sweep && !k_opt->count())
                throw ValidationError("cluster needs --k or --sweep");
            cmd_cluster(preset, k_opt->count() ? std::optional<int>(k) : std::nullopt, sweep,
                        seed, out);
        } else if (evalcmd->parsed()) {
            cmd_eval(preset, labels_path, k, protocol, ratio, eval_reps, seed, out);
        } else if (depthcmd->parsed()) {
            cmd_depth(region_path, target_path, side, out);
        }
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
