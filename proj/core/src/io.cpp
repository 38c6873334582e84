#include "grassdim/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "grassdim/errors.hpp"

namespace grassdim {
namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("malformed number '" + s + "' in " + context);
  }
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

void write_cloud_csv(const PointCloud& cloud, const std::string& path) {
  std::ostringstream out;
  const int n = cloud.dim();
  for (int i = 0; i < n; ++i) out << 'x' << (i + 1) << ',';
  out << "w\n";
  for (Eigen::Index r = 0; r < cloud.size(); ++r) {
    for (int c = 0; c < n; ++c) out << format_double(cloud.points(r, c)) << ',';
    out << format_double(cloud.weights[r]) << '\n';
  }
  write_text_file(path, out.str());
}

PointCloud read_cloud_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("empty cloud file '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  if (header.size() < 2 || header.back() != "w")
    throw ConfigError("bad cloud header in '" + path + "' (want x1,...,xn,w)");
  const int n = static_cast<int>(header.size()) - 1;
  for (int i = 0; i < n; ++i)
    if (header[static_cast<std::size_t>(i)] != "x" + std::to_string(i + 1))
      throw ConfigError("bad cloud header in '" + path + "' (want x1,...,xn,w)");

  std::vector<double> values;
  std::int64_t rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != static_cast<std::size_t>(n) + 1)
      throw ConfigError("row " + std::to_string(rows + 1) + " of '" + path +
                        "' has " + std::to_string(fields.size()) +
                        " fields, want " + std::to_string(n + 1));
    for (const auto& f : fields) values.push_back(parse_double(f, path));
    ++rows;
  }
  if (rows == 0) throw ConfigError("cloud file '" + path + "' has no points");
  PointCloud cloud;
  cloud.points.resize(rows, n);
  cloud.weights.resize(rows);
  for (std::int64_t r = 0; r < rows; ++r) {
    for (int c = 0; c < n; ++c)
      cloud.points(r, c) = values[static_cast<std::size_t>(r * (n + 1) + c)];
    cloud.weights[r] = values[static_cast<std::size_t>(r * (n + 1) + n)];
  }
  return cloud;
}

void write_cloud_gdpc(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  const std::uint32_t n = static_cast<std::uint32_t>(cloud.dim());
  const std::uint64_t count = static_cast<std::uint64_t>(cloud.size());
  out.write("GDPC", 4);
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  std::vector<double> row(n + 1);
  for (Eigen::Index r = 0; r < cloud.size(); ++r) {
    for (std::uint32_t c = 0; c < n; ++c) row[c] = cloud.points(r, c);
    row[n] = cloud.weights[r];
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(sizeof(double) * row.size()));
  }
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

PointCloud read_cloud_gdpc(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "' for reading");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "GDPC", 4) != 0)
    throw ConfigError("'" + path + "' is not a binary cloud file");
  std::uint32_t n = 0;
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  if (!in || n == 0 || n > 16 || count == 0 || count > 100'000'000ULL)
    throw ConfigError("'" + path + "' has an implausible header");
  PointCloud cloud;
  cloud.points.resize(static_cast<Eigen::Index>(count), static_cast<int>(n));
  cloud.weights.resize(static_cast<Eigen::Index>(count));
  std::vector<double> row(n + 1);
  for (std::uint64_t r = 0; r < count; ++r) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(sizeof(double) * row.size()));
    if (!in) throw ConfigError("'" + path + "' is truncated");
    for (std::uint32_t c = 0; c < n; ++c)
      cloud.points(static_cast<Eigen::Index>(r), static_cast<int>(c)) = row[c];
    cloud.weights[static_cast<Eigen::Index>(r)] = row[n];
  }
  return cloud;
}

namespace {

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void write_cloud(const PointCloud& cloud, const std::string& path) {
  if (has_suffix(path, ".gdpc"))
    write_cloud_gdpc(cloud, path);
  else
    write_cloud_csv(cloud, path);
}

PointCloud read_cloud(const std::string& path) {
  if (has_suffix(path, ".gdpc")) return read_cloud_gdpc(path);
  return read_cloud_csv(path);
}

std::string subspace_to_json(const Subspace& v) {
  nlohmann::ordered_json j;
  j["ambient_dim"] = v.ambient_dim();
  j["dim"] = v.dim();
  std::vector<double> frame;
  frame.reserve(static_cast<std::size_t>(v.ambient_dim() * v.dim()));
  for (int r = 0; r < v.ambient_dim(); ++r)
    for (int c = 0; c < v.dim(); ++c) frame.push_back(v.frame()(r, c));
  j["frame"] = frame;
  return j.dump();
}

Subspace subspace_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad subspace JSON: ") + e.what());
  }
  if (!j.contains("ambient_dim") || !j.contains("dim") || !j.contains("frame"))
    throw ConfigError("subspace JSON needs ambient_dim, dim, frame");
  const int n = j["ambient_dim"].get<int>();
  const int m = j["dim"].get<int>();
  const auto frame = j["frame"].get<std::vector<double>>();
  if (n < 1 || m < 1 || frame.size() != static_cast<std::size_t>(n) * m)
    throw ConfigError("subspace JSON frame size disagrees with dimensions");
  Eigen::MatrixXd f(n, m);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < m; ++c)
      f(r, c) = frame[static_cast<std::size_t>(r * m + c)];
  try {
    return Subspace(std::move(f));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("subspace JSON frame is not orthonormal: ") +
                      e.what());
  }
}

void write_subspace(const Subspace& v, const std::string& path) {
  write_text_file(path, subspace_to_json(v) + "\n");
}

Subspace read_subspace(const std::string& path) {
  return subspace_from_json(read_text_file(path));
}

std::string estimate_to_json(const DimensionEstimate& est) {
  nlohmann::ordered_json j;
  j["method"] = est.method;
  j["value"] = est.value;
  j["slope_stderr"] = est.slope_stderr;
  j["scale_levels"] = est.scale_levels;
  j["counts"] = est.counts;
  return j.dump();
}

}  // namespace grassdim
