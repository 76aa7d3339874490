#pragma once

#include <functional>
#include <string>

namespace mtlrrc {

// Shortest decimal form that round-trips a double exactly. Used for every
// emitted CSV/JSON number so that output files are byte-stable.
std::string format_double(double value);

// Runs fn(0..n-1) on up to `workers` threads. Work items must be
// independent; the first exception thrown by any item is rethrown after all
// threads join. workers <= 1 runs inline.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace mtlrrc
