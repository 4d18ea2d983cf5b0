#include <cstdlib>
#include <string_view>

#include "georoute/kernels.hpp"

namespace georoute::kernels {

#ifdef GEOROUTE_HAVE_AVX2
const Table& avx2_table_impl();
const Table* avx2_table() { return &avx2_table_impl(); }
#else
const Table* avx2_table() { return nullptr; }
#endif

Isa detected_isa() {
  static const Isa isa = [] {
    const char* forced = std::getenv("GEOROUTE_ISA");
    if (forced != nullptr && std::string_view(forced) == "scalar") return Isa::Scalar;
#if defined(__x86_64__) && defined(GEOROUTE_HAVE_AVX2)
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
    return Isa::Scalar;
  }();
  return isa;
}

const Table& active() {
  static const Table& t = detected_isa() == Isa::Avx2 ? *avx2_table() : scalar_table();
  return t;
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace georoute::kernels
