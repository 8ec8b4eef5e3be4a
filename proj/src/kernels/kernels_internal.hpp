#pragma once

#include "psyn/kernels.hpp"

namespace psyn::kernels::detail {

// Defined only when the corresponding translation unit is compiled in.
const KernelTable& avx2_table();
const KernelTable& neon_table();

}  // namespace psyn::kernels::detail
