#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tropgrad/kernels.hpp"
#include "tropgrad/trop_core.hpp"

namespace tropgrad {

/// Ordered key/value provenance (generator, seed, normalization, ...).
class Metadata {
 public:
  void set(const std::string& key, std::string value);
  std::optional<std::string> get(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// K points of TPT^N, stored canonicalized in both row-major and column-major
/// order (the latter feeds the batched kernels).
class Dataset {
 public:
  Dataset() = default;

  /// Canonicalizes each row. All rows must share a dimension >= 2.
  static Dataset from_rows(const std::vector<std::vector<double>>& rows, Metadata meta = {});
  static Dataset from_points(const std::vector<TropPoint>& points, Metadata meta = {});

  std::size_t size() const noexcept { return samples_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return samples_ == 0; }

  std::span<const double> row(std::size_t k) const noexcept { return {rows_.data() + k * dim_, dim_}; }
  TropPoint point(std::size_t k) const { return TropPoint::from_canonical({row(k).begin(), row(k).end()}); }
  std::vector<TropPoint> points() const;

  kernels::ColumnView columns() const noexcept { return {cols_.data(), samples_, dim_, samples_}; }

  /// Max-convention polytope spanned by the points.
  TropPolytope hull() const;

  Dataset subset(std::span<const std::size_t> indices) const;
  Dataset scaled(double factor) const;

  const Metadata& metadata() const noexcept { return meta_; }
  Metadata& metadata() noexcept { return meta_; }

 private:
  std::size_t samples_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> rows_;
  std::vector<double> cols_;
  Metadata meta_;
};

/// Dataset CSV: a header line
///   # tropgrad-dataset v1; generator=...; seed=...; N=...; K=...; normalized=...
/// (further `key=value` fields may follow), then one comma-separated row per
/// point with round-trip precision.
void write_dataset_csv(std::ostream& out, const Dataset& data);
Dataset read_dataset_csv(std::istream& in);

void save_dataset(const std::string& path, const Dataset& data);
Dataset load_dataset(const std::string& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace tropgrad
