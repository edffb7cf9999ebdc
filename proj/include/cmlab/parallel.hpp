#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace cmlab {

// Worker count for data-parallel loops (default 1; the CLI reads CMHL_WORKERS).
int worker_count();
void set_worker_count(int n);

// Runs fn(block_index, begin, end) over [0, n) in fixed blocks of size `block`.
// Results come back in block order, so a left-to-right reduction of them is
// independent of the worker count. Workers must not change the MPFR default precision.
template <class T>
std::vector<T> parallel_blocks(size_t n, size_t block, const std::function<T(size_t, size_t, size_t)>& fn);

void run_blocks(size_t nblocks, const std::function<void(size_t)>& task);

template <class T>
std::vector<T> parallel_blocks(size_t n, size_t block, const std::function<T(size_t, size_t, size_t)>& fn) {
    if (block == 0) block = 1;
    size_t nb = (n + block - 1) / block;
    std::vector<T> out(nb);
    run_blocks(nb, [&](size_t b) {
        size_t lo = b * block, hi = lo + block < n ? lo + block : n;
        out[b] = fn(b, lo, hi);
    });
    return out;
}

}  // namespace cmlab
