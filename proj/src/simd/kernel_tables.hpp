#pragma once

#include "matchmix/simd/kernels.hpp"

namespace matchmix::simd::detail {

const KernelTable& scalar_table();
#if defined(MATCHMIX_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace matchmix::simd::detail
