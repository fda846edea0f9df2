#pragma once
// Dense vector kernels shared by the DSP front-end and the autodiff ops.
//
// Each kernel has a scalar reference implementation and, where the CPU
// supports it, an AVX2+FMA variant. The variant is picked once at startup
// from cpuid; set_level() lets tests and benchmarks pin a specific path.
// All matrices are dense row-major.

#include <cstddef>
#include <span>
#include <string_view>

namespace vgs::simd {

enum class Level { kScalar, kAvx2 };

/// Best level supported by this CPU and build.
Level detected_level();
/// Level currently used by the dispatching entry points.
Level active_level();
/// Pins the dispatch level. Requests above detected_level() are clamped.
Level set_level(Level level);
std::string_view level_name(Level level);

/// Restores the previous level on scope exit.
class ScopedLevel {
 public:
  explicit ScopedLevel(Level level) : previous_(active_level()) { set_level(level); }
  ~ScopedLevel() { set_level(previous_); }
  ScopedLevel(const ScopedLevel&) = delete;
  ScopedLevel& operator=(const ScopedLevel&) = delete;

 private:
  Level previous_;
};

template <typename T>
T dot(std::span<const T> a, std::span<const T> b);

/// y += alpha * x
template <typename T>
void axpy(T alpha, std::span<const T> x, std::span<T> y);

/// y = W x, or y += W x when accumulate is set. W is rows x cols.
template <typename T>
void gemv(std::span<const T> w, std::size_t rows, std::size_t cols, std::span<const T> x,
          std::span<T> y, bool accumulate = false);

/// y += W^T x. x has `rows` entries, y has `cols`.
template <typename T>
void gemv_t(std::span<const T> w, std::size_t rows, std::size_t cols, std::span<const T> x,
            std::span<T> y);

/// W += alpha * x y^T (rank-1 update).
template <typename T>
void ger(std::span<T> w, std::size_t rows, std::size_t cols, T alpha, std::span<const T> x,
         std::span<const T> y);

}  // namespace vgs::simd
