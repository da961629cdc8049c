#include <atomic>
#include <cstdlib>
#include <cstring>

#include "tropgrad/error.hpp"
#include "tropgrad/kernels.hpp"

namespace tropgrad::kernels {

namespace {

// -1: automatic; otherwise the Isa value.
std::atomic<int> g_forced{-1};

Isa detect() noexcept {
  if (const char* env = std::getenv("TROPGRAD_ISA")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::Scalar;
    if (std::strcmp(env, "avx2") == 0 && isa_available(Isa::Avx2)) return Isa::Avx2;
  }
  return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

void check_shapes(std::span<const double> t, ColumnView x) {
  if (t.size() != x.dim) throw DimensionError("kernel: point dimension does not match samples");
  if (x.dim < 2) throw DimensionError("kernel: dimension must be at least 2");
  if (x.samples > x.stride && x.dim > 1) throw InvalidInput("kernel: column stride shorter than sample count");
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(TROPGRAD_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept {
  static const Isa detected = detect();
  const int forced = g_forced.load(std::memory_order_relaxed);
  if (forced >= 0) {
    const auto isa = static_cast<Isa>(forced);
    return isa_available(isa) ? isa : Isa::Scalar;
  }
  return detected;
}

void force_isa(std::optional<Isa> isa) noexcept {
  g_forced.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

void sample_extrema(std::span<const double> t, ColumnView x, std::span<SampleExtrema> out) {
  sample_extrema(active_isa(), t, x, out);
}

void sample_extrema(Isa isa, std::span<const double> t, ColumnView x, std::span<SampleExtrema> out) {
  check_shapes(t, x);
  if (out.size() < x.samples) throw DimensionError("sample_extrema: output too short");
#if defined(TROPGRAD_HAVE_AVX2)
  if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) {
    detail::sample_extrema_avx2(t.data(), x, out.data());
    return;
  }
#endif
  (void)isa;
  detail::sample_extrema_scalar(t.data(), x, 0, x.samples, out.data());
}

void positive_part_sums(std::span<const double> t, ColumnView x, std::span<double> out) {
  positive_part_sums(active_isa(), t, x, out);
}

void positive_part_sums(Isa isa, std::span<const double> t, ColumnView x, std::span<double> out) {
  check_shapes(t, x);
  if (out.size() < x.samples * x.dim) throw DimensionError("positive_part_sums: output too short");
#if defined(TROPGRAD_HAVE_AVX2)
  if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) {
    detail::positive_part_sums_avx2(t.data(), x, out.data());
    return;
  }
#endif
  (void)isa;
  detail::positive_part_sums_scalar(t.data(), x, 0, x.samples, out.data());
}

}  // namespace tropgrad::kernels
