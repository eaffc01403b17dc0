#include "mclab/kernels.hpp"

#include <cstdlib>

namespace mclab::kernels {

#ifdef MCLAB_HAVE_KERNELS_AVX2
const Ops* avx2_ops();
#endif
#ifdef MCLAB_HAVE_KERNELS_AVX512
const Ops* avx512_ops();
#endif
#ifdef MCLAB_HAVE_KERNELS_NEON
const Ops* neon_ops();
#endif

namespace {

std::vector<const Ops*> detect() {
  std::vector<const Ops*> v{&scalar()};
#if defined(__x86_64__) || defined(_M_X64)
#ifdef MCLAB_HAVE_KERNELS_AVX2
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    v.push_back(avx2_ops());
#endif
#ifdef MCLAB_HAVE_KERNELS_AVX512
  if (__builtin_cpu_supports("avx512f")) v.push_back(avx512_ops());
#endif
#endif
#ifdef MCLAB_HAVE_KERNELS_NEON
  v.push_back(neon_ops());
#endif
  return v;
}

const Ops* select_default(const std::vector<const Ops*>& avail) {
  // Widest available wins; MCLAB_KERNEL overrides when it names a usable one.
  const Ops* best = avail.back();
  if (const char* env = std::getenv("MCLAB_KERNEL")) {
    for (const Ops* k : avail)
      if (std::string_view(k->name) == env) return k;
  }
  return best;
}

}  // namespace

std::vector<const Ops*> available() {
  static const std::vector<const Ops*> avail = detect();
  return avail;
}

const Ops* find(std::string_view name) {
  for (const Ops* k : available())
    if (name == k->name) return k;
  return nullptr;
}

const Ops& active() {
  static const Ops* chosen = select_default(available());
  return *chosen;
}

}  // namespace mclab::kernels
