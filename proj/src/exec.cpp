#include "wifitrack/exec.hpp"

#include <omp.h>

namespace wifitrack {

void set_thread_count(int n) {
    if (n >= 1) omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace wifitrack
