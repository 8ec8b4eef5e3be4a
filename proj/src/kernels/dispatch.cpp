#include <atomic>

#include "kernels_internal.hpp"
#include "psyn/error.hpp"

namespace psyn::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(PSYN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* best_table() {
  for (Isa isa : available_isas())
    if (const KernelTable* t = table_for(isa)) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{best_table()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &scalar_table();
    case Isa::kAvx2:
#if defined(PSYN_HAVE_AVX2)
      if (cpu_has_avx2()) return &detail::avx2_table();
#endif
      return nullptr;
    case Isa::kNeon:
#if defined(PSYN_HAVE_NEON)
      return &detail::neon_table();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kAvx2, Isa::kNeon})
    if (table_for(isa) != nullptr) out.push_back(isa);
  out.push_back(Isa::kScalar);
  return out;
}

const KernelTable& active() { return *active_slot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  const KernelTable* t = table_for(isa);
  if (t == nullptr)
    throw ConfigError("kernel variant '" + std::string(isa_name(isa)) + "' is not available on this CPU");
  active_slot().store(t, std::memory_order_relaxed);
}

}  // namespace psyn::kernels
