#ifndef NSASYM_UTIL_HPP
#define NSASYM_UTIL_HPP

#include <cstddef>
#include <functional>
#include <string>

namespace nsasym {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Worker cap from NSASYM_THREADS (default 1).  Parallel maps only; anything
// that feeds a serialized artifact stays a serial reduction so results are
// bitwise reproducible.
int max_threads();

// Chunked parallel map over [0, count).  Falls back to a plain loop when the
// range is small or max_threads() == 1.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

std::string format_double(double v);  // shortest round-trip decimal

// FNV-1a, used to stamp outputs with the configuration they came from.
std::string fnv1a_hex(const std::string& text);

}  // namespace nsasym

#endif
