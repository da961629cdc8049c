#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "test_util.hpp"
#include "tropgrad/kernels.hpp"

using namespace tropgrad;
using namespace tropgrad::kernels;

namespace {

struct Matrix {
  std::vector<double> data;  // column-major, K x N
  std::size_t k, n;
  ColumnView view() const { return {data.data(), k, n, k}; }
};

// Random sample matrix; with `ties`, entries are small integers so that
// argmin/argmax ties are common.
Matrix random_matrix(CounterRng& rng, std::size_t k, std::size_t n, bool ties) {
  Matrix m{std::vector<double>(k * n), k, n};
  for (double& x : m.data) x = ties ? static_cast<double>(rng.below(3)) : rng.normal();
  return m;
}

SampleExtrema naive_extrema(const std::vector<double>& t, const Matrix& x, std::size_t k) {
  std::vector<double> y(x.n);
  for (std::size_t i = 0; i < x.n; ++i) y[i] = t[i] - x.data[i * x.k + k];
  SampleExtrema e{y[0], y[0], 0, 0, 0, -1};
  for (std::size_t i = 1; i < x.n; ++i) {
    if (y[i] > e.max) e.max = y[i], e.argmax = static_cast<int>(i);
    if (y[i] < e.min) e.min = y[i], e.argmin = static_cast<int>(i);
  }
  for (std::size_t i = 0; i < x.n; ++i) {
    if (static_cast<int>(i) == e.argmin) continue;
    if (e.argmin2 < 0 || y[i] < e.min2) e.min2 = y[i], e.argmin2 = static_cast<int>(i);
  }
  return e;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(Kernels, ScalarExtremaMatchNaiveOracle) {
  CounterRng rng(21);
  for (bool ties : {false, true}) {
    for (std::size_t k : {1u, 3u, 4u, 7u, 33u}) {
      for (std::size_t n : {2u, 3u, 6u, 28u}) {
        const auto x = random_matrix(rng, k, n, ties);
        std::vector<double> t(n);
        for (double& v : t) v = ties ? static_cast<double>(rng.below(3)) : rng.normal();
        std::vector<SampleExtrema> out(k);
        sample_extrema(Isa::Scalar, t, x.view(), out);
        for (std::size_t s = 0; s < k; ++s) {
          const auto want = naive_extrema(t, x, s);
          EXPECT_EQ(out[s].max, want.max);
          EXPECT_EQ(out[s].min, want.min);
          EXPECT_EQ(out[s].min2, want.min2);
          EXPECT_EQ(out[s].argmax, want.argmax);
          EXPECT_EQ(out[s].argmin, want.argmin);
          EXPECT_EQ(out[s].argmin2, want.argmin2);
        }
      }
    }
  }
}

TEST(Kernels, ScalarPositivePartSumsMatchFormula) {
  CounterRng rng(22);
  for (std::size_t k : {1u, 5u, 9u}) {
    for (std::size_t n : {2u, 4u, 7u}) {
      const auto x = random_matrix(rng, k, n, false);
      const auto t = testutil::normal_vec(rng, n);
      std::vector<double> out(k * n);
      positive_part_sums(Isa::Scalar, t, x.view(), out);
      for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t j = 0; j < n; ++j) {
          double want = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            want += std::max((t[j] - x.data[j * k + s]) - (t[i] - x.data[i * k + s]), 0.0);
          }
          EXPECT_NEAR(out[s * n + j], want, 1e-12);
        }
      }
    }
  }
}

TEST(Kernels, Avx2IsBitwiseIdenticalToScalar) {
  if (!isa_available(Isa::Avx2)) GTEST_SKIP() << "AVX2 not available on this machine";
  CounterRng rng(23);
  for (bool ties : {false, true}) {
    for (std::size_t k : {1u, 2u, 3u, 4u, 5u, 8u, 13u, 100u}) {
      for (std::size_t n : {2u, 3u, 6u, 28u}) {
        const auto x = random_matrix(rng, k, n, ties);
        std::vector<double> t(n);
        for (double& v : t) v = ties ? static_cast<double>(rng.below(3)) : rng.normal();

        std::vector<SampleExtrema> a(k), b(k);
        sample_extrema(Isa::Scalar, t, x.view(), a);
        sample_extrema(Isa::Avx2, t, x.view(), b);
        for (std::size_t s = 0; s < k; ++s) {
          EXPECT_TRUE(same_bits(a[s].max, b[s].max));
          EXPECT_TRUE(same_bits(a[s].min, b[s].min));
          EXPECT_TRUE(same_bits(a[s].min2, b[s].min2));
          EXPECT_EQ(a[s].argmax, b[s].argmax);
          EXPECT_EQ(a[s].argmin, b[s].argmin);
          EXPECT_EQ(a[s].argmin2, b[s].argmin2);
        }

        std::vector<double> p(k * n), q(k * n);
        positive_part_sums(Isa::Scalar, t, x.view(), p);
        positive_part_sums(Isa::Avx2, t, x.view(), q);
        for (std::size_t i = 0; i < p.size(); ++i) EXPECT_TRUE(same_bits(p[i], q[i])) << i;
      }
    }
  }
}

TEST(Kernels, StridedViewsAreRespected) {
  // A view over the first K of a wider column-major buffer.
  CounterRng rng(24);
  const std::size_t k = 6, stride = 11, n = 5;
  std::vector<double> buf(stride * n);
  for (double& v : buf) v = rng.normal();
  Matrix packed{std::vector<double>(k * n), k, n};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < k; ++s) packed.data[i * k + s] = buf[i * stride + s];
  }
  const auto t = testutil::normal_vec(rng, n);
  for (Isa isa : {Isa::Scalar, Isa::Avx2}) {
    if (!isa_available(isa)) continue;
    std::vector<SampleExtrema> a(k), b(k);
    sample_extrema(isa, t, ColumnView{buf.data(), k, n, stride}, a);
    sample_extrema(isa, t, packed.view(), b);
    for (std::size_t s = 0; s < k; ++s) {
      EXPECT_EQ(a[s].max, b[s].max);
      EXPECT_EQ(a[s].argmin2, b[s].argmin2);
    }
  }
}

TEST(Kernels, ForcedIsaDrivesDispatch) {
  force_isa(Isa::Scalar);
  EXPECT_EQ(active_isa(), Isa::Scalar);
  force_isa(Isa::Avx2);
  EXPECT_EQ(active_isa(), isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar);
  force_isa(std::nullopt);
  EXPECT_TRUE(isa_available(active_isa()));
  EXPECT_EQ(isa_name(Isa::Scalar), "scalar");
}
