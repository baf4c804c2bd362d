#include "fput2d/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>

namespace fput2d {

int available_threads() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* cap = std::getenv("FPUT2D_THREADS")) {
    try {
      const int c = std::stoi(cap);
      if (c > 0) n = std::min(n, c);
    } catch (...) {
      // ignore malformed values
    }
  }
  return n;
}

void set_loop_threads(int threads) { omp_set_num_threads(std::max(1, threads)); }

}  // namespace fput2d
