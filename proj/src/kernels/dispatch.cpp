#include <atomic>
#include <cstdlib>
#include <string>

#include "daml/error.hpp"
#include "daml/kernels.hpp"

namespace daml::kernels {

namespace {

constexpr KernelTable kScalarTable{scalar::dot, scalar::sum, scalar::axpy,
                                   scalar::scale, scalar::gemv, scalar::gemv_t};
#if defined(DAML_HAVE_AVX2)
constexpr KernelTable kAvx2Table{avx2::dot, avx2::sum, avx2::axpy,
                                 avx2::scale, avx2::gemv, avx2::gemv_t};
#endif
#if defined(DAML_HAVE_NEON)
constexpr KernelTable kNeonTable{neon::dot, neon::sum, neon::axpy,
                                 neon::scale, neon::gemv, neon::gemv_t};
#endif

bool env_forces_scalar() {
  const char* v = std::getenv("DAML_FORCE_SCALAR");
  return v != nullptr && std::string(v) != "0" && std::string(v) != "";
}

Isa detect() {
  if (env_forces_scalar()) return Isa::kScalar;
#if defined(DAML_HAVE_AVX2)
  if (isa_supported(Isa::kAvx2)) return Isa::kAvx2;
#endif
#if defined(DAML_HAVE_NEON)
  return Isa::kNeon;
#endif
  return Isa::kScalar;
}

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{detect()};
  return slot;
}

std::atomic<const KernelTable*>& table_slot() {
  static std::atomic<const KernelTable*> slot{&table_for(active_slot().load())};
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

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return true;
    case Isa::kAvx2:
#if defined(DAML_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(DAML_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw ValidationError("kernel ISA not supported here: " + std::string(isa_name(isa)));
  }
  switch (isa) {
#if defined(DAML_HAVE_AVX2)
    case Isa::kAvx2: return kAvx2Table;
#endif
#if defined(DAML_HAVE_NEON)
    case Isa::kNeon: return kNeonTable;
#endif
    default: return kScalarTable;
  }
}

Isa active_isa() { return active_slot().load(std::memory_order_relaxed); }

const KernelTable& active() { return *table_slot().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  const KernelTable* table = &table_for(isa);
  active_slot().store(isa, std::memory_order_relaxed);
  table_slot().store(table, std::memory_order_relaxed);
}

}  // namespace daml::kernels
