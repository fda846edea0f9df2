#include <atomic>
#include <cassert>
#include <stdexcept>

#include "kernel_table.hpp"
#include "vgs/simd/kernels.hpp"

namespace vgs::simd {

namespace {

Level probe() {
#if defined(VGS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Level::kAvx2;
#endif
  return Level::kScalar;
}

std::atomic<Level>& current() {
  static std::atomic<Level> level{detected_level()};
  return level;
}

template <typename T>
detail::KernelTable<T> table_for(Level level) {
  switch (level) {
#if defined(VGS_HAVE_AVX2)
    case Level::kAvx2:
      return {static_cast<T (*)(const T*, const T*, std::size_t)>(&detail::avx2::dot),
              static_cast<void (*)(T, const T*, T*, std::size_t)>(&detail::avx2::axpy)};
#endif
    default:
      return {static_cast<T (*)(const T*, const T*, std::size_t)>(&detail::scalar::dot),
              static_cast<void (*)(T, const T*, T*, std::size_t)>(&detail::scalar::axpy)};
  }
}

template <typename T>
detail::KernelTable<T> active_table() {
  return table_for<T>(current().load(std::memory_order_relaxed));
}

void check_size(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

Level detected_level() {
  static const Level level = probe();
  return level;
}

Level active_level() { return current().load(std::memory_order_relaxed); }

Level set_level(Level level) {
  if (level == Level::kAvx2 && detected_level() != Level::kAvx2) level = Level::kScalar;
  current().store(level, std::memory_order_relaxed);
  return level;
}

std::string_view level_name(Level level) {
  switch (level) {
    case Level::kAvx2:
      return "avx2";
    case Level::kScalar:
      return "scalar";
  }
  return "unknown";
}

template <typename T>
T dot(std::span<const T> a, std::span<const T> b) {
  check_size(a.size() == b.size(), "dot: length mismatch");
  return active_table<T>().dot(a.data(), b.data(), a.size());
}

template <typename T>
void axpy(T alpha, std::span<const T> x, std::span<T> y) {
  check_size(x.size() == y.size(), "axpy: length mismatch");
  active_table<T>().axpy(alpha, x.data(), y.data(), x.size());
}

template <typename T>
void gemv(std::span<const T> w, std::size_t rows, std::size_t cols, std::span<const T> x,
          std::span<T> y, bool accumulate) {
  check_size(w.size() == rows * cols && x.size() == cols && y.size() == rows,
             "gemv: shape mismatch");
  const auto k = active_table<T>();
  for (std::size_t r = 0; r < rows; ++r) {
    const T v = k.dot(w.data() + r * cols, x.data(), cols);
    y[r] = accumulate ? y[r] + v : v;
  }
}

template <typename T>
void gemv_t(std::span<const T> w, std::size_t rows, std::size_t cols, std::span<const T> x,
            std::span<T> y) {
  check_size(w.size() == rows * cols && x.size() == rows && y.size() == cols,
             "gemv_t: shape mismatch");
  const auto k = active_table<T>();
  for (std::size_t r = 0; r < rows; ++r) {
    if (x[r] != T(0)) k.axpy(x[r], w.data() + r * cols, y.data(), cols);
  }
}

template <typename T>
void ger(std::span<T> w, std::size_t rows, std::size_t cols, T alpha, std::span<const T> x,
         std::span<const T> y) {
  check_size(w.size() == rows * cols && x.size() == rows && y.size() == cols,
             "ger: shape mismatch");
  const auto k = active_table<T>();
  for (std::size_t r = 0; r < rows; ++r) {
    const T a = alpha * x[r];
    if (a != T(0)) k.axpy(a, y.data(), w.data() + r * cols, cols);
  }
}

#define VGS_INSTANTIATE(T)                                                                      \
  template T dot<T>(std::span<const T>, std::span<const T>);                                    \
  template void axpy<T>(T, std::span<const T>, std::span<T>);                                   \
  template void gemv<T>(std::span<const T>, std::size_t, std::size_t, std::span<const T>,       \
                        std::span<T>, bool);                                                    \
  template void gemv_t<T>(std::span<const T>, std::size_t, std::size_t, std::span<const T>,     \
                          std::span<T>);                                                        \
  template void ger<T>(std::span<T>, std::size_t, std::size_t, T, std::span<const T>,           \
                       std::span<const T>);

VGS_INSTANTIATE(float)
VGS_INSTANTIATE(double)
#undef VGS_INSTANTIATE

}  // namespace vgs::simd
