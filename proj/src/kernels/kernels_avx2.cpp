#include <immintrin.h>

#include <limits>
#include <vector>

#include "tropgrad/kernels.hpp"

namespace tropgrad::kernels::detail {

namespace {
constexpr std::size_t kLanes = 4;
}

// Four samples per iteration; coordinates are scanned in ascending order and
// every update mirrors the scalar branch structure through blends.
void sample_extrema_avx2(const double* t, ColumnView x, SampleExtrema* out) {
  const std::size_t n = x.dim;
  const std::size_t full = x.samples - x.samples % kLanes;
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  const __m256d minus_one = _mm256_set1_pd(-1.0);

  for (std::size_t k0 = 0; k0 < full; k0 += kLanes) {
    const __m256d y0 = _mm256_sub_pd(_mm256_set1_pd(t[0]), _mm256_loadu_pd(x.data + k0));
    __m256d vmax = y0, vmin = y0, vmin2 = inf;
    __m256d amax = _mm256_setzero_pd(), amin = _mm256_setzero_pd(), amin2 = minus_one;
    for (std::size_t i = 1; i < n; ++i) {
      const __m256d y = _mm256_sub_pd(_mm256_set1_pd(t[i]), _mm256_loadu_pd(x.data + i * x.stride + k0));
      const __m256d idx = _mm256_set1_pd(static_cast<double>(i));

      const __m256d gt = _mm256_cmp_pd(y, vmax, _CMP_GT_OQ);
      vmax = _mm256_blendv_pd(vmax, y, gt);
      amax = _mm256_blendv_pd(amax, idx, gt);

      const __m256d lt = _mm256_cmp_pd(y, vmin, _CMP_LT_OQ);
      const __m256d lt2 = _mm256_cmp_pd(y, vmin2, _CMP_LT_OQ);
      vmin2 = _mm256_blendv_pd(_mm256_blendv_pd(vmin2, y, lt2), vmin, lt);
      amin2 = _mm256_blendv_pd(_mm256_blendv_pd(amin2, idx, lt2), amin, lt);
      vmin = _mm256_blendv_pd(vmin, y, lt);
      amin = _mm256_blendv_pd(amin, idx, lt);
    }
    alignas(32) double b_max[kLanes], b_min[kLanes], b_min2[kLanes];
    alignas(32) double i_max[kLanes], i_min[kLanes], i_min2[kLanes];
    _mm256_store_pd(b_max, vmax);
    _mm256_store_pd(b_min, vmin);
    _mm256_store_pd(b_min2, vmin2);
    _mm256_store_pd(i_max, amax);
    _mm256_store_pd(i_min, amin);
    _mm256_store_pd(i_min2, amin2);
    for (std::size_t l = 0; l < kLanes; ++l) {
      out[k0 + l] = SampleExtrema{b_max[l],
                                  b_min[l],
                                  b_min2[l],
                                  static_cast<int>(i_max[l]),
                                  static_cast<int>(i_min[l]),
                                  static_cast<int>(i_min2[l])};
    }
  }
  sample_extrema_scalar(t, x, full, x.samples, out);
}

void positive_part_sums_avx2(const double* t, ColumnView x, double* out) {
  const std::size_t n = x.dim;
  const std::size_t full = x.samples - x.samples % kLanes;
  const __m256d zero = _mm256_setzero_pd();
  std::vector<double> y(n * kLanes);  // y(i) for four samples at y[i * 4]

  for (std::size_t k0 = 0; k0 < full; k0 += kLanes) {
    for (std::size_t i = 0; i < n; ++i) {
      _mm256_storeu_pd(y.data() + i * kLanes,
                       _mm256_sub_pd(_mm256_set1_pd(t[i]), _mm256_loadu_pd(x.data + i * x.stride + k0)));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const __m256d yj = _mm256_loadu_pd(y.data() + j * kLanes);
      __m256d acc = zero;
      for (std::size_t i = 0; i < n; ++i) {
        acc = _mm256_add_pd(acc, _mm256_max_pd(_mm256_sub_pd(yj, _mm256_loadu_pd(y.data() + i * kLanes)), zero));
      }
      alignas(32) double lanes[kLanes];
      _mm256_store_pd(lanes, acc);
      for (std::size_t l = 0; l < kLanes; ++l) out[(k0 + l) * n + j] = lanes[l];
    }
  }
  positive_part_sums_scalar(t, x, full, x.samples, out);
}

}  // namespace tropgrad::kernels::detail
