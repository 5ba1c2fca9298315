#pragma once

namespace loadmask::nn {

/// Which kernel family a network dispatches to. Results are bit-identical.
enum class Backend { kSerial, kParallel };

}  // namespace loadmask::nn
