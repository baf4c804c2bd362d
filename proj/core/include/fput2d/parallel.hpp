#pragma once

namespace fput2d {

/// Thread budget: hardware concurrency, capped by FPUT2D_THREADS when set.
int available_threads();

/// Sets the number of threads the calling thread uses for data-parallel
/// loops (lattice stencils, resampling). Values < 1 mean 1.
void set_loop_threads(int threads);

}  // namespace fput2d
