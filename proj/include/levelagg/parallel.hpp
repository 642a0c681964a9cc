#pragma once

#include <cstddef>
#include <functional>

namespace levelagg {

//! Worker count used by parallel_for; 0 selects the hardware count.
void set_thread_count(unsigned n);
unsigned thread_count();

//! Runs fn(i) for i in [0, n). Callers own determinism: workers must only
//! write to disjoint, index-addressed slots. Nested calls run inline.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace levelagg
