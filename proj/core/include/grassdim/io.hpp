#pragma once

#include <string>

#include "grassdim/dimension.hpp"
#include "grassdim/grassmann.hpp"
#include "grassdim/grid.hpp"

namespace grassdim {

/// Text format: header "x1,...,xn,w", one row per atom, 17 significant
/// digits (lossless float64 round-trip).
void write_cloud_csv(const PointCloud& cloud, const std::string& path);
PointCloud read_cloud_csv(const std::string& path);

/// Binary sidecar for large clouds: magic "GDPC", little-endian u32 ambient
/// dimension, u64 point count, then count rows of (n+1) float64 values
/// (coordinates then weight).
void write_cloud_gdpc(const PointCloud& cloud, const std::string& path);
PointCloud read_cloud_gdpc(const std::string& path);

/// Dispatch on extension: ".gdpc" binary, anything else CSV.
void write_cloud(const PointCloud& cloud, const std::string& path);
PointCloud read_cloud(const std::string& path);

/// Subspace as JSON: {"ambient_dim", "dim", "frame" (row-major)}.
std::string subspace_to_json(const Subspace& v);
Subspace subspace_from_json(const std::string& text);
void write_subspace(const Subspace& v, const std::string& path);
Subspace read_subspace(const std::string& path);

/// DimensionEstimate as a JSON object string.
std::string estimate_to_json(const DimensionEstimate& est);

/// Whole-file text helpers (ConfigError on failure).
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace grassdim
