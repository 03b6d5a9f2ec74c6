#include "anece/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace anece::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() {
  if (const char* env = std::getenv("ANECE_KERNELS")) {
    const std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && available(Backend::avx2)) return Backend::avx2;
  }
  return available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{initial_backend()};
  return b;
}

}  // namespace

bool available(Backend b) {
  if (b == Backend::scalar) return true;
  static const bool avx2 = detail::avx2_table() != nullptr && cpu_has_avx2();
  return avx2;
}

const Table& table(Backend b) {
  if (!available(b)) throw std::runtime_error("kernel backend not available on this CPU");
  return b == Backend::avx2 ? *detail::avx2_table() : detail::scalar_table;
}

const Table& active() { return table(current().load(std::memory_order_relaxed)); }

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void select(Backend b) {
  if (!available(b)) throw std::runtime_error("kernel backend not available on this CPU");
  current().store(b, std::memory_order_relaxed);
}

std::string_view name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

}  // namespace anece::kernels
