#include "tropgrad/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tropgrad/error.hpp"
#include "tropgrad/kernels.hpp"

namespace tropgrad {

namespace {

constexpr double kTieTol = 1e-9;

kernels::ColumnView single_sample(const Dataset& d, std::size_t k) {
  const auto all = d.columns();
  return {all.data + k, 1, all.dim, all.stride};
}

void validate_partition(const Partition& partition, std::size_t n) {
  if (partition.size() < 2) throw InvalidInput("partition: need at least 2 blocks");
  std::vector<int> seen(n, 0);
  for (const auto& block : partition) {
    if (block.empty()) throw InvalidInput("partition: empty block");
    for (std::size_t i : block) {
      if (i >= n) throw InvalidInput("partition: index " + std::to_string(i) + " out of range");
      if (seen[i]++) throw InvalidInput("partition: index " + std::to_string(i) + " appears twice");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen[i]) throw InvalidInput("partition: index " + std::to_string(i) + " not covered");
  }
}

}  // namespace

std::string_view objective_name(ObjectiveKind kind) noexcept {
  switch (kind) {
    case ObjectiveKind::FermatWeber:
      return "fermat_weber";
    case ObjectiveKind::FrechetMean:
      return "frechet_mean";
    case ObjectiveKind::LinearRegression:
      return "linear_regression";
    case ObjectiveKind::WassersteinP:
      return "wasserstein_p";
    case ObjectiveKind::WassersteinInf:
      return "wasserstein_inf";
  }
  return "unknown";
}

ObjectiveKind parse_objective(std::string_view name) {
  for (auto k : {ObjectiveKind::FermatWeber, ObjectiveKind::FrechetMean, ObjectiveKind::LinearRegression,
                 ObjectiveKind::WassersteinP, ObjectiveKind::WassersteinInf}) {
    if (objective_name(k) == name) return k;
  }
  throw InvalidInput("unknown objective '" + std::string(name) + "'");
}

Partition contiguous_partition(std::size_t n, std::size_t m) {
  if (m < 2 || m > n) throw InvalidInput("contiguous_partition: need 2 <= M <= N");
  Partition out(m);
  std::size_t next = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t size = n / m + (j < n % m ? 1 : 0);
    for (std::size_t s = 0; s < size; ++s) out[j].push_back(next++);
  }
  return out;
}

Objective Objective::fermat_weber(Dataset data, Convention direction) {
  if (data.empty()) throw InvalidInput("fermat_weber: empty dataset");
  Objective o;
  o.kind_ = ObjectiveKind::FermatWeber;
  o.convention_ = direction;
  o.data_ = std::move(data);
  return o;
}

Objective Objective::frechet_mean(Dataset data, Convention direction) {
  auto o = fermat_weber(std::move(data), direction);
  o.kind_ = ObjectiveKind::FrechetMean;
  return o;
}

Objective Objective::linear_regression(Dataset data) {
  if (data.empty()) throw InvalidInput("linear_regression: empty dataset");
  Objective o;
  o.kind_ = ObjectiveKind::LinearRegression;
  o.data_ = std::move(data);
  return o;
}

Objective Objective::wasserstein(Dataset data, Dataset target, Partition partition, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidInput("wasserstein: p must be a finite real >= 1");
  if (data.empty()) throw InvalidInput("wasserstein: empty dataset");
  if (target.size() != data.size()) throw InvalidInput("wasserstein: data and target sizes differ");
  validate_partition(partition, data.dim());
  if (target.dim() != partition.size()) throw DimensionError("wasserstein: target dimension must equal block count");

  Objective o;
  o.kind_ = ObjectiveKind::WassersteinP;
  o.p_ = p;
  o.data_ = std::move(data);
  o.target_ = std::move(target);
  o.partition_ = std::move(partition);
  o.block_of_.assign(o.data_.dim(), 0);
  for (std::size_t j = 0; j < o.partition_.size(); ++j) {
    std::sort(o.partition_[j].begin(), o.partition_[j].end());
    for (std::size_t i : o.partition_[j]) o.block_of_[i] = j;
  }
  o.z_ = build_z_points(o);
  return o;
}

Objective Objective::wasserstein_inf(Dataset data, Dataset target, Partition partition) {
  auto o = wasserstein(std::move(data), std::move(target), std::move(partition), 1.0);
  o.kind_ = ObjectiveKind::WassersteinInf;
  o.p_ = std::numeric_limits<double>::infinity();
  return o;
}

Objective Objective::with_convention(Convention direction) const {
  if (direction == Convention::Max && kind_ != ObjectiveKind::FermatWeber && kind_ != ObjectiveKind::FrechetMean) {
    throw InvalidInput(std::string(name()) + " is a min-location problem; the max convention does not apply");
  }
  Objective o = *this;
  o.convention_ = direction;
  return o;
}

Objective Objective::subset(std::size_t k) const {
  if (k >= samples()) throw InvalidInput("Objective::subset: sample index out of range");
  const std::size_t idx[1] = {k};
  Objective o = *this;
  o.data_ = data_.subset(idx);
  if (is_wasserstein()) {
    o.target_ = target_.subset(idx);
    o.z_ = z_.subset(idx);
  }
  return o;
}

void Objective::check_point(std::span<const double> t) const {
  if (t.size() != dim()) {
    throw DimensionError(std::string(name()) + ": point has dimension " + std::to_string(t.size()) + ", expected " +
                         std::to_string(dim()));
  }
}

double Objective::value(std::span<const double> t) const {
  std::vector<double> g(dim());
  return evaluate(t, g);
}

std::vector<double> Objective::subgradient(std::span<const double> t) const {
  std::vector<double> g(dim());
  evaluate(t, g);
  return g;
}

// h_k = max_j w_j - min_j w_j with w_j = max_{i in J_j} (z_ki - t_i). Adds
// weight * grad h_k to g and returns h_k.
double Objective::wasserstein_term(std::size_t k, std::span<const double> t, std::span<double> g,
                                   double weight) const {
  const auto z = z_.row(k);
  double wmax = -std::numeric_limits<double>::infinity();
  double wmin = std::numeric_limits<double>::infinity();
  std::size_t at_max = 0, at_min = 0;
  for (const auto& block : partition_) {
    double w = -std::numeric_limits<double>::infinity();
    std::size_t arg = block.front();
    for (std::size_t i : block) {
      const double v = z[i] - t[i];
      if (v > w) {
        w = v;
        arg = i;
      }
    }
    if (w > wmax) {
      wmax = w;
      at_max = arg;
    }
    if (w < wmin) {
      wmin = w;
      at_min = arg;
    }
  }
  const double h = wmax - wmin;
  if (weight != 0.0 && at_max != at_min && h > 0.0) {
    g[at_max] -= weight;
    g[at_min] += weight;
  }
  return h;
}

double Objective::evaluate(std::span<const double> t, std::span<double> g) const {
  check_point(t);
  if (g.size() != dim()) throw DimensionError("Objective::evaluate: gradient buffer has wrong length");
  std::fill(g.begin(), g.end(), 0.0);
  const std::size_t K = samples();
  const double inv_k = 1.0 / static_cast<double>(K);

  if (is_wasserstein()) {
    std::vector<double> h(K);
    std::vector<double> scratch(dim());
    for (std::size_t k = 0; k < K; ++k) h[k] = wasserstein_term(k, t, scratch, 0.0);
    if (kind_ == ObjectiveKind::WassersteinInf) {
      const auto it = std::max_element(h.begin(), h.end());
      wasserstein_term(static_cast<std::size_t>(it - h.begin()), t, g, 1.0);
      return *it;
    }
    double acc = 0.0;
    for (double v : h) acc += std::pow(v, p_);
    const double f = std::pow(acc * inv_k, 1.0 / p_);
    if (f > 0.0) {
      const double scale = std::pow(f, 1.0 - p_) * inv_k;
      for (std::size_t k = 0; k < K; ++k) {
        if (h[k] > 0.0) wasserstein_term(k, t, g, scale * std::pow(h[k], p_ - 1.0));
      }
    }
    return f;
  }

  std::vector<kernels::SampleExtrema> ex(K);
  kernels::sample_extrema(t, data_.columns(), ex);

  switch (kind_) {
    case ObjectiveKind::FermatWeber: {
      double acc = 0.0;
      for (const auto& e : ex) {
        acc += e.max - e.min;
        g[e.argmax] += inv_k;
        g[e.argmin] -= inv_k;
      }
      return acc * inv_k;
    }
    case ObjectiveKind::FrechetMean: {
      double acc = 0.0;
      for (const auto& e : ex) acc += (e.max - e.min) * (e.max - e.min);
      const double f = std::sqrt(acc * inv_k);
      if (f > 0.0) {
        for (const auto& e : ex) {
          const double w = (e.max - e.min) * inv_k / f;
          if (w == 0.0) continue;
          g[e.argmax] += w;
          g[e.argmin] -= w;
        }
      }
      return f;
    }
    case ObjectiveKind::LinearRegression: {
      std::size_t active = 0;
      double best = ex[0].min2 - ex[0].min;
      for (std::size_t k = 1; k < K; ++k) {
        const double h = ex[k].min2 - ex[k].min;
        if (h > best) {
          best = h;
          active = k;
        }
      }
      g[ex[active].argmin] -= 1.0;
      g[ex[active].argmin2] += 1.0;
      return best;
    }
    default:
      break;
  }
  return 0.0;
}

double Objective::evaluate_sample(std::size_t k, std::span<const double> t, std::span<double> g) const {
  check_point(t);
  if (k >= samples()) throw InvalidInput("evaluate_sample: sample index out of range");
  if (g.size() != dim()) throw DimensionError("evaluate_sample: gradient buffer has wrong length");
  std::fill(g.begin(), g.end(), 0.0);
  if (is_wasserstein()) return wasserstein_term(k, t, g, 1.0);

  kernels::SampleExtrema e{};
  kernels::sample_extrema(t, single_sample(data_, k), std::span<kernels::SampleExtrema>(&e, 1));
  if (kind_ == ObjectiveKind::LinearRegression) {
    g[e.argmin] -= 1.0;
    g[e.argmin2] += 1.0;
    return e.min2 - e.min;
  }
  if (e.max > e.min) {
    g[e.argmax] += 1.0;
    g[e.argmin] -= 1.0;
  }
  return e.max - e.min;
}

Dataset build_z_points(const Objective& obj) {
  if (!obj.is_wasserstein()) throw InvalidInput("build_z_points: objective is not a Wasserstein projection");
  const auto& x = obj.data();
  const auto& y = obj.target();
  std::vector<std::size_t> block_of(x.dim());
  for (std::size_t j = 0; j < obj.partition().size(); ++j) {
    for (std::size_t i : obj.partition()[j]) block_of[i] = j;
  }
  std::vector<std::vector<double>> rows(x.size(), std::vector<double>(x.dim()));
  for (std::size_t k = 0; k < x.size(); ++k) {
    const auto xr = x.row(k);
    const auto yr = y.row(k);
    for (std::size_t i = 0; i < x.dim(); ++i) rows[k][i] = xr[i] - yr[block_of[i]];
  }
  Metadata meta;
  meta.set("generator", "z_points");
  return Dataset::from_rows(rows, meta);
}

bool check_assumption1(const Objective& obj, std::span<const double> t) {
  return check_assumption1(obj, t, obj.subgradient(t), obj.convention());
}

bool check_assumption1(const Objective& obj, std::span<const double> t, std::span<const double> g) {
  return check_assumption1(obj, t, g, obj.convention());
}

bool check_assumption1(const Objective& obj, std::span<const double> t, std::span<const double> g,
                       Convention convention) {
  const Dataset& pts = obj.kernel_points();
  require_same_dim(t, g, "check_assumption1");
  if (t.size() != pts.dim()) throw DimensionError("check_assumption1: point dimension mismatch");
  const bool min_conv = convention == Convention::Min;
  const std::size_t n = t.size();

  // Extreme value of t - p_k for each kernel point.
  std::vector<double> extreme(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto p = pts.row(k);
    double e = t[0] - p[0];
    for (std::size_t i = 1; i < n; ++i) e = min_conv ? std::min(e, t[i] - p[i]) : std::max(e, t[i] - p[i]);
    extreme[k] = e;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const bool flagged = min_conv ? g[j] < 0.0 : g[j] > 0.0;
    if (!flagged) continue;
    bool ok = false;
    for (std::size_t k = 0; k < pts.size() && !ok; ++k) {
      const double y = t[j] - pts.row(k)[j];
      ok = min_conv ? y <= extreme[k] + kTieTol : y >= extreme[k] - kTieTol;
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace tropgrad
