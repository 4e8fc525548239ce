#include "netlift/kernels.hpp"

#include "netlift/errors.hpp"

namespace netlift::kern {

#if defined(__x86_64__) || defined(_M_X64)
extern const KernelOps kAvx2;
#endif

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

KernelVariant parse_kernel_variant(const std::string& name) {
  if (name == "auto") return KernelVariant::Auto;
  if (name == "scalar") return KernelVariant::ScalarRef;
  if (name == "opt") return KernelVariant::ScalarOpt;
  if (name == "avx2") return KernelVariant::Avx2;
  throw invalid_parameter("unknown kernel variant '" + name + "'");
}

std::string kernel_variant_name(KernelVariant v) {
  switch (v) {
    case KernelVariant::Auto: return "auto";
    case KernelVariant::ScalarRef: return "scalar";
    case KernelVariant::ScalarOpt: return "opt";
    case KernelVariant::Avx2: return "avx2";
  }
  return "auto";
}

const KernelOps& get_kernels(KernelVariant v) {
  switch (v) {
    case KernelVariant::ScalarRef:
      return kScalarRef;
    case KernelVariant::ScalarOpt:
      return kScalarOpt;
    case KernelVariant::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      if (avx2_supported()) return kAvx2;
#endif
      throw invalid_parameter("avx2 kernels not supported on this CPU");
    case KernelVariant::Auto:
    default:
#if defined(__x86_64__) || defined(_M_X64)
      if (avx2_supported()) return kAvx2;
#endif
      return kScalarOpt;
  }
}

std::vector<const KernelOps*> available_kernels() {
  std::vector<const KernelOps*> out = {&kScalarRef, &kScalarOpt};
#if defined(__x86_64__) || defined(_M_X64)
  if (avx2_supported()) out.push_back(&kAvx2);
#endif
  return out;
}

}  // namespace netlift::kern
