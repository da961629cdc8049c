#pragma once

// Batched per-sample reductions over a dataset, the inner loops shared by the
// objectives, the hull projection and the convergence diagnostics.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 variant vectorized across samples. The variants use
// the same operation order per sample and only exact operations beyond one
// subtraction per entry, so their outputs are bitwise identical; the choice
// of ISA never changes results.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace tropgrad::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa) noexcept;
bool isa_available(Isa isa) noexcept;

/// ISA used by the dispatching entry points. Chosen once from the CPU, unless
/// the TROPGRAD_ISA environment variable ("scalar" or "avx2") or force_isa()
/// says otherwise.
Isa active_isa() noexcept;

/// Pins the dispatch target (nullopt restores automatic selection). Intended
/// for tests and benchmarks; requesting an unavailable ISA falls back to scalar.
void force_isa(std::optional<Isa> isa) noexcept;

/// Non-owning view of a K x N sample matrix stored column-major:
/// coordinate i of sample k lives at data[i * stride + k].
struct ColumnView {
  const double* data = nullptr;
  std::size_t samples = 0;
  std::size_t dim = 0;
  std::size_t stride = 0;

  double at(std::size_t k, std::size_t i) const noexcept { return data[i * stride + k]; }
};

/// Extrema of y = t - x_k for one sample. Indices follow lowest-index
/// tie-breaking; min2 is the smallest entry among the coordinates other than
/// argmin (so it equals min under a tie).
struct SampleExtrema {
  double max;
  double min;
  double min2;
  int argmax;
  int argmin;
  int argmin2;
};

void sample_extrema(std::span<const double> t, ColumnView x, std::span<SampleExtrema> out);
void sample_extrema(Isa isa, std::span<const double> t, ColumnView x, std::span<SampleExtrema> out);

/// out[k * N + j] = sum_i max((t_j - x_kj) - (t_i - x_ki), 0), summed in
/// ascending i.
void positive_part_sums(std::span<const double> t, ColumnView x, std::span<double> out);
void positive_part_sums(Isa isa, std::span<const double> t, ColumnView x, std::span<double> out);

namespace detail {
void sample_extrema_scalar(const double* t, ColumnView x, std::size_t k_begin, std::size_t k_end, SampleExtrema* out);
void positive_part_sums_scalar(const double* t, ColumnView x, std::size_t k_begin, std::size_t k_end, double* out);
#if defined(TROPGRAD_HAVE_AVX2)
void sample_extrema_avx2(const double* t, ColumnView x, SampleExtrema* out);
void positive_part_sums_avx2(const double* t, ColumnView x, double* out);
#endif
}  // namespace detail

}  // namespace tropgrad::kernels
