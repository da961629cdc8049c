#include "tropgrad/trop_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "tropgrad/error.hpp"

namespace tropgrad {

namespace {

struct MinMax {
  double min;
  double max;
};

MinMax diff_extrema(std::span<const double> x, std::span<const double> y) {
  MinMax r{x[0] - y[0], x[0] - y[0]};
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    r.min = std::min(r.min, d);
    r.max = std::max(r.max, d);
  }
  return r;
}

}  // namespace

void require_same_dim(std::span<const double> a, std::span<const double> b, const char* where) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(where) + ": dimension mismatch (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) throw DimensionError(std::string(where) + ": dimension must be at least 2");
}

TropPoint TropPoint::canonicalize(std::span<const double> raw) {
  if (raw.size() < 2) throw DimensionError("canonicalize: need at least 2 coordinates");
  for (double v : raw) {
    if (!std::isfinite(v)) throw InvalidInput("canonicalize: non-finite coordinate");
  }
  const double mean = std::accumulate(raw.begin(), raw.end(), 0.0) / static_cast<double>(raw.size());
  std::vector<double> c(raw.size());
  std::transform(raw.begin(), raw.end(), c.begin(), [mean](double v) { return v - mean; });
  return TropPoint(std::move(c));
}

TropPoint TropPoint::from_canonical(std::vector<double> coords) {
  if (coords.size() < 2) throw DimensionError("from_canonical: need at least 2 coordinates");
  double sum = 0.0, scale = 1.0;
  for (double v : coords) {
    if (!std::isfinite(v)) throw InvalidInput("from_canonical: non-finite coordinate");
    sum += v;
    scale = std::max(scale, std::abs(v));
  }
  if (std::abs(sum) > 1e-9 * scale * static_cast<double>(coords.size())) {
    throw InvalidInput("from_canonical: coordinates do not sum to zero");
  }
  return TropPoint(std::move(coords));
}

double trop_norm(std::span<const double> x) {
  if (x.empty()) throw DimensionError("trop_norm: empty point");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi - *lo;
}

double d_tr(std::span<const double> x, std::span<const double> y) {
  require_same_dim(x, y, "d_tr");
  const auto e = diff_extrema(x, y);
  return e.max - e.min;
}

double d_tri_min(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a, b, "d_tri_min");
  double sum = 0.0, lo = b[0] - a[0];
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = b[i] - a[i];
    sum += d;
    lo = std::min(lo, d);
  }
  return std::max(0.0, sum - static_cast<double>(a.size()) * lo);
}

double d_tri_max(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a, b, "d_tri_max");
  double sum = 0.0, hi = b[0] - a[0];
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = b[i] - a[i];
    sum += d;
    hi = std::max(hi, d);
  }
  return std::max(0.0, static_cast<double>(a.size()) * hi - sum);
}

TopTwo top_two(std::span<const double> y) {
  if (y.size() < 2) throw DimensionError("top_two: need at least 2 entries");
  TopTwo r{y[0], -std::numeric_limits<double>::infinity(), 0, y.size()};
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (y[i] > r.first) {
      r.second = r.first;
      r.second_index = r.first_index;
      r.first = y[i];
      r.first_index = i;
    } else if (y[i] > r.second) {
      r.second = y[i];
      r.second_index = i;
    }
  }
  return r;
}

double hyperplane_distance(std::span<const double> x, std::span<const double> apex) {
  require_same_dim(x, apex, "hyperplane_distance");
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - apex[i];
  const auto tt = top_two(y);
  return tt.first - tt.second;
}

TropPolytope::TropPolytope(std::vector<TropPoint> generators, Convention convention)
    : generators_(std::move(generators)), convention_(convention) {
  if (generators_.empty()) throw InvalidInput("TropPolytope: need at least one generator");
  const std::size_t n = generators_.front().dim();
  for (const auto& g : generators_) {
    if (g.dim() != n) throw DimensionError("TropPolytope: generators differ in dimension");
  }
}

TropPoint trop_combination(std::span<const double> coeffs, const TropPolytope& polytope) {
  if (coeffs.size() != polytope.size()) throw DimensionError("trop_combination: one coefficient per generator");
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw InvalidInput("trop_combination: non-finite coefficient");
  }
  const auto& gens = polytope.generators();
  const bool use_max = polytope.convention() == Convention::Max;
  std::vector<double> out(polytope.dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = coeffs[0] + gens[0][i];
    for (std::size_t k = 1; k < gens.size(); ++k) {
      const double v = coeffs[k] + gens[k][i];
      acc = use_max ? std::max(acc, v) : std::min(acc, v);
    }
    out[i] = acc;
  }
  return TropPoint::canonicalize(out);
}

std::vector<TropPoint> trop_segment_sample(std::span<const double> a, std::span<const double> b,
                                           std::size_t n_samples, Convention convention) {
  require_same_dim(a, b, "trop_segment_sample");
  if (n_samples < 2) throw InvalidInput("trop_segment_sample: need at least 2 samples");
  const TropPoint ca = TropPoint::canonicalize(a);
  const TropPoint cb = TropPoint::canonicalize(b);
  const double d = d_tr(ca, cb);
  const bool use_max = convention == Convention::Max;

  std::vector<TropPoint> out;
  out.reserve(n_samples);
  std::vector<double> raw(ca.dim());
  for (std::size_t s = 0; s < n_samples; ++s) {
    const double lambda = -d + 2.0 * d * static_cast<double>(s) / static_cast<double>(n_samples - 1);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      raw[i] = use_max ? std::max(lambda + ca[i], cb[i]) : std::min(lambda + ca[i], cb[i]);
    }
    out.push_back(TropPoint::canonicalize(raw));
  }
  return out;
}

TropPoint project_tconv(std::span<const double> t, const TropPolytope& polytope) {
  if (polytope.convention() != Convention::Max) {
    throw InvalidInput("project_tconv: only max-convention hulls are supported");
  }
  require_same_dim(t, polytope.generators().front(), "project_tconv");
  const auto& gens = polytope.generators();
  std::vector<double> out(t.size(), -std::numeric_limits<double>::infinity());
  for (const auto& x : gens) {
    const double lambda = diff_extrema(t, x).min;
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = std::max(out[i], lambda + x[i]);
  }
  return TropPoint::canonicalize(out);
}

double dist_to_tconv(std::span<const double> t, const TropPolytope& polytope) {
  return d_tr(t, project_tconv(t, polytope));
}

}  // namespace tropgrad
