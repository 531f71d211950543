#pragma once

namespace wifitrack {

/// Selects between the OpenMP kernel and the serial reference path.
/// Both paths produce identical output; the serial one exists for
/// testing and benchmarking.
enum class Exec { serial, parallel };

/// Caps the OpenMP worker count for subsequent parallel regions.
/// Values < 1 leave the runtime default in place.
void set_thread_count(int n);

int max_threads();

}  // namespace wifitrack
