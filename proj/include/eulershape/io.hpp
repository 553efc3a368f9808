#pragma once

#include <cstdint>
#include <string>

#include "eulershape/metric.hpp"
#include "eulershape/transform.hpp"

namespace eulershape {

/// Whole-file read; throws IoError on failure.
std::string read_text_file(const std::string& path);

/// Write via a sibling temp file and rename, so a crash never leaves a
/// half-written output. Throws IoError on failure.
void atomic_write_text(const std::string& path, const std::string& content);

/// FNV-1a 64-bit content digest, hex encoded; used for run provenance.
std::string content_digest(const std::string& content);

/// Shortest decimal that round-trips the double exactly (17 significant
/// digits).
std::string format_double(double v);

/// CSV with the ids on the first row, then the symmetric matrix. Values
/// round-trip bit-exactly.
void write_distance_csv(const std::string& path, const DistanceMatrix& m);
DistanceMatrix read_distance_csv(const std::string& path);

/// Curve files: one CSV row per direction plus a JSON sidecar
/// {kind, mode, seed, a, m, n_dirs} at sidecar_path(csv). Fixed-direction
/// matrices and seeded samples share the CSV layout and differ in the mode.
void write_ect_csv(const std::string& csv_path, const EctMatrix& m);
void write_sample_csv(const std::string& csv_path, const CurveMeasure& s);

struct CurveFile {
    bool fixed = true;
    EctMatrix ect;        // filled when fixed
    CurveMeasure sample;  // filled otherwise
};
CurveFile read_curves_csv(const std::string& csv_path);

/// Histogram CSV: header row with the chi bins, then one row per window
/// carrying its grid-index bounds and masses; metadata in the sidecar.
void write_histogram_csv(const std::string& csv_path, const SampHistogram& h);
SampHistogram read_histogram_csv(const std::string& csv_path);

/// Two columns t,value plus a sidecar with the grid.
void write_detect_csv(const std::string& csv_path, const DetectCurve& d);
DetectCurve read_detect_csv(const std::string& csv_path);

/// The JSON sidecar sits next to the CSV with a .json extension.
std::string sidecar_path(const std::string& csv_path);

}  // namespace eulershape
