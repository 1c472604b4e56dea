#pragma once

#include <functional>

namespace ag {

// Paths are processed in fixed blocks. Block boundaries never depend on the
// thread count, so per-block partial results reduced in block order give the
// same bits for any number of threads.
constexpr int kBlockPaths = 512;

void set_thread_count(int n);
int thread_count();

inline int block_count(int n) { return (n + kBlockPaths - 1) / kBlockPaths; }

// fn(block, begin, end) for each block of [0, n).
void for_blocks(int n, const std::function<void(int, int, int)>& fn);

// fn(item) for item in [0, n), one item at a time.
void for_items(int n, const std::function<void(int)>& fn);

}  // namespace ag
