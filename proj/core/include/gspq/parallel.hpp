#pragma once

#include <cstddef>
#include <functional>

namespace gspq {

/// Worker cap used by the batch routines. 0 restores the hardware default.
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Calls body(i) for every i in [0, n), split into contiguous chunks across
/// threads. Each index is visited exactly once; the first exception thrown by
/// any worker is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gspq
