#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "levelagg/simd.hpp"

namespace levelagg::simd {

#if defined(LEVELAGG_HAVE_AVX2)
const Ops& avx2_ops();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(LEVELAGG_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops* resolve() {
  const char* env = std::getenv("LEVELAGG_SIMD");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
#if defined(LEVELAGG_HAVE_AVX2)
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return &avx2_ops();
#endif
  }
#if defined(LEVELAGG_HAVE_AVX2)
  if (cpu_has_avx2()) return &avx2_ops();
#endif
  return &scalar_ops();
}

std::atomic<const Ops*>& active_slot() {
  static std::atomic<const Ops*> slot{resolve()};
  return slot;
}

}  // namespace

const Ops& ops() { return *active_slot().load(std::memory_order_relaxed); }

bool backend_available(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
      return cpu_has_avx2();
  }
  return false;
}

Backend active_backend() {
  return &ops() == &scalar_ops() ? Backend::Scalar : Backend::Avx2;
}

void force_backend(Backend b) {
  if (!backend_available(b)) throw std::invalid_argument("simd backend not available");
  if (b == Backend::Scalar) {
    active_slot().store(&scalar_ops());
    return;
  }
#if defined(LEVELAGG_HAVE_AVX2)
  active_slot().store(&avx2_ops());
#endif
}

}  // namespace levelagg::simd
