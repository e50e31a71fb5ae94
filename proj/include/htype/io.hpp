#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "htype/estimate.hpp"
#include "htype/grid.hpp"
#include "htype/group.hpp"
#include "htype/group_function.hpp"

namespace htype {

using Json = nlohmann::ordered_json;

/// Version stamped into every JSON report and manifest.
inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

/// {n, m, U: [[row-major entries] per generator]}.
Json group_to_json(const HTypeGroup& g);
HTypeGroup group_from_json(const Json& j);

/// Binary grid file: "HTGRID01", uint64 n, uint64 dims, per axis
/// (uint64 count, float64 half_extent), then interleaved re/im float64
/// samples in row-major order. Little-endian as written by this host.
void write_grid(const std::string& path, const GridField& f, int n);
GridField read_grid(const std::string& path, int* n = nullptr);

/// Debug form: one row per sample, coordinates then re, im.
void write_grid_csv(const std::string& path, const GridField& f);

/// Samples on (|z|, t) points: "HTSAMP01", uint64 n, m, radius count,
/// t count, the radii, the t points, then interleaved re/im values.
void write_samples(const std::string& path, const GroupSamples& s);
GroupSamples read_samples(const std::string& path);

/// CSV with header "mu,c_mu,k_used,tail_bound", 17 significant digits.
std::string curve_csv(const ConstantCurve& c);
std::vector<ConstantRow> parse_curve_csv(const std::string& text);

Json exponent_report(const ExponentPrediction& pred, const ExponentFit& fit);

/// "log:lo:hi:count", "lin:lo:hi:count" or "eps1:lo:hi:count"; the last gives
/// mu = 1 - eps on a geometric eps-grid (sorted increasing in mu).
std::vector<double> parse_mu_spec(const std::string& spec);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

std::string read_text(const std::string& path);
/// Writes through a temporary file and renames.
void write_text(const std::string& path, const std::string& text);

}  // namespace htype
