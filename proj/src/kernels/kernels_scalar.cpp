#include "tropgrad/kernels.hpp"

#include <limits>
#include <vector>

namespace tropgrad::kernels::detail {

void sample_extrema_scalar(const double* t, ColumnView x, std::size_t k_begin, std::size_t k_end,
                           SampleExtrema* out) {
  const std::size_t n = x.dim;
  for (std::size_t k = k_begin; k < k_end; ++k) {
    const double y0 = t[0] - x.at(k, 0);
    double vmax = y0, vmin = y0, vmin2 = std::numeric_limits<double>::infinity();
    int amax = 0, amin = 0, amin2 = -1;
    for (std::size_t i = 1; i < n; ++i) {
      const double y = t[i] - x.at(k, i);
      const int idx = static_cast<int>(i);
      if (y > vmax) {
        vmax = y;
        amax = idx;
      }
      if (y < vmin) {
        vmin2 = vmin;
        amin2 = amin;
        vmin = y;
        amin = idx;
      } else if (y < vmin2) {
        vmin2 = y;
        amin2 = idx;
      }
    }
    out[k] = SampleExtrema{vmax, vmin, vmin2, amax, amin, amin2};
  }
}

void positive_part_sums_scalar(const double* t, ColumnView x, std::size_t k_begin, std::size_t k_end,
                               double* out) {
  const std::size_t n = x.dim;
  std::vector<double> y(n);
  for (std::size_t k = k_begin; k < k_end; ++k) {
    for (std::size_t i = 0; i < n; ++i) y[i] = t[i] - x.at(k, i);
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = y[j] - y[i];
        acc += d > 0.0 ? d : 0.0;
      }
      out[k * n + j] = acc;
    }
  }
}

}  // namespace tropgrad::kernels::detail
