#pragma once

namespace f4f {

// Number of worker threads for data-parallel kernels. Honors the
// FAIR4FREE_THREADS environment variable (values < 1 are ignored) and is
// otherwise the hardware concurrency reported by OpenMP. All parallel loops
// assign each output element to exactly one thread with a fixed reduction
// order, so results are bit-identical for any thread count.
int worker_count();

}  // namespace f4f
