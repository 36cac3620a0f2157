// Runtime backend selection.  Chosen once per process so every computation in
// a run uses the same kernels (keeps runs byte-reproducible on a machine).

#include "gtp/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace gtp::kernels {

#if defined(GTP_HAVE_AVX2)
const Backend* avx2_impl();
#endif

const Backend* avx2() {
#if defined(GTP_HAVE_AVX2)
  return avx2_impl();
#else
  return nullptr;
#endif
}

const Backend& active() {
  static const Backend* chosen = [] {
    if (const char* env = std::getenv("GTP_KERNEL")) {
      if (std::strcmp(env, "scalar") == 0) return &scalar();
      if (std::strcmp(env, "avx2") == 0 && avx2() != nullptr) return avx2();
      // Unknown or unsupported request: fall through to auto selection.
    }
    if (const Backend* b = avx2()) return b;
    return &scalar();
  }();
  return *chosen;
}

}  // namespace gtp::kernels
