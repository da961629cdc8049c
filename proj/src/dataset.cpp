#include "tropgrad/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tropgrad/error.hpp"

namespace tropgrad {

namespace {

constexpr const char* kDatasetTag = "tropgrad-dataset v1";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& token) {
  const std::string s = trim(token);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw InvalidInput("dataset: cannot parse number '" + s + "'");
  return v;
}

}  // namespace

void Metadata::set(const std::string& key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(key, std::move(value));
}

std::optional<std::string> Metadata::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

Dataset Dataset::from_rows(const std::vector<std::vector<double>>& rows, Metadata meta) {
  if (rows.empty()) throw InvalidInput("Dataset: no points");
  std::vector<TropPoint> points;
  points.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) throw DimensionError("Dataset: rows differ in dimension");
    points.push_back(TropPoint::canonicalize(r));
  }
  return from_points(points, std::move(meta));
}

Dataset Dataset::from_points(const std::vector<TropPoint>& points, Metadata meta) {
  if (points.empty()) throw InvalidInput("Dataset: no points");
  Dataset d;
  d.samples_ = points.size();
  d.dim_ = points.front().dim();
  if (d.dim_ < 2) throw DimensionError("Dataset: dimension must be at least 2");
  d.rows_.reserve(d.samples_ * d.dim_);
  for (const auto& p : points) {
    if (p.dim() != d.dim_) throw DimensionError("Dataset: rows differ in dimension");
    d.rows_.insert(d.rows_.end(), p.coords().begin(), p.coords().end());
  }
  d.cols_.resize(d.rows_.size());
  for (std::size_t k = 0; k < d.samples_; ++k) {
    for (std::size_t i = 0; i < d.dim_; ++i) d.cols_[i * d.samples_ + k] = d.rows_[k * d.dim_ + i];
  }
  d.meta_ = std::move(meta);
  return d;
}

std::vector<TropPoint> Dataset::points() const {
  std::vector<TropPoint> out;
  out.reserve(samples_);
  for (std::size_t k = 0; k < samples_; ++k) out.push_back(point(k));
  return out;
}

TropPolytope Dataset::hull() const { return TropPolytope(points(), Convention::Max); }

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<std::vector<double>> rows;
  rows.reserve(indices.size());
  for (std::size_t k : indices) {
    if (k >= samples_) throw InvalidInput("Dataset::subset: index out of range");
    rows.emplace_back(row(k).begin(), row(k).end());
  }
  return from_rows(rows, meta_);
}

Dataset Dataset::scaled(double factor) const {
  std::vector<std::vector<double>> rows;
  rows.reserve(samples_);
  for (std::size_t k = 0; k < samples_; ++k) {
    std::vector<double> r(row(k).begin(), row(k).end());
    for (double& v : r) v *= factor;
    rows.push_back(std::move(r));
  }
  return from_rows(rows, meta_);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  Metadata header;
  header.set("generator", data.metadata().get("generator").value_or("unknown"));
  header.set("seed", data.metadata().get("seed").value_or("none"));
  header.set("N", std::to_string(data.dim()));
  header.set("K", std::to_string(data.size()));
  header.set("normalized", data.metadata().get("normalized").value_or("false"));
  for (const auto& [k, v] : data.metadata().entries()) {
    if (k != "N" && k != "K") header.set(k, v);
  }
  out << "# " << kDatasetTag;
  for (const auto& [k, v] : header.entries()) out << "; " << k << '=' << v;
  out << '\n';
  for (std::size_t k = 0; k < data.size(); ++k) {
    const auto r = data.row(k);
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out << ',';
      out << format_double(r[i]);
    }
    out << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  Metadata meta;
  std::vector<std::vector<double>> rows;
  bool saw_header = false;
  while (std::getline(in, line)) {
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      if (!saw_header && s.find(kDatasetTag) != std::string::npos) {
        saw_header = true;
        std::stringstream fields(s.substr(1));
        std::string field;
        while (std::getline(fields, field, ';')) {
          const auto eq = field.find('=');
          if (eq == std::string::npos) continue;
          meta.set(trim(field.substr(0, eq)), trim(field.substr(eq + 1)));
        }
      }
      continue;
    }
    std::vector<double> r;
    std::stringstream cells(s);
    std::string cell;
    while (std::getline(cells, cell, ',')) r.push_back(parse_double(cell));
    rows.push_back(std::move(r));
  }
  if (!saw_header) throw InvalidInput("dataset: missing '# tropgrad-dataset v1' header");
  if (rows.empty()) throw InvalidInput("dataset: no data rows");
  // Rows written by write_dataset_csv are already canonical; keeping them
  // as-is makes a save/load round trip bit-exact.
  std::vector<TropPoint> points;
  points.reserve(rows.size());
  for (auto& r : rows) {
    double sum = 0.0, scale = 1.0;
    for (double v : r) {
      sum += v;
      scale = std::max(scale, std::abs(v));
    }
    const bool canonical = r.size() >= 2 && std::abs(sum) <= 1e-12 * scale * static_cast<double>(r.size());
    points.push_back(canonical ? TropPoint::from_canonical(std::move(r)) : TropPoint::canonicalize(r));
  }
  auto data = Dataset::from_points(points, meta);
  if (auto k = meta.get("K"); k && *k != std::to_string(data.size())) {
    throw InvalidInput("dataset: header K=" + *k + " but file has " + std::to_string(data.size()) + " rows");
  }
  if (auto n = meta.get("N"); n && *n != std::to_string(data.dim())) {
    throw InvalidInput("dataset: header N=" + *n + " but rows have " + std::to_string(data.dim()) + " columns");
  }
  return data;
}

void save_dataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_dataset_csv(out, data);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open dataset " + path);
  return read_dataset_csv(in);
}

}  // namespace tropgrad
