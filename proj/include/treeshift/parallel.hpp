#pragma once

namespace treeshift {

// Execution policy for the sweep kernels.  Every kernel is written
// index-addressed — iteration i writes only slot i of a preallocated output,
// with no shared mutable state and no reductions — so the two policies
// produce bitwise-identical results and `serial` stays the reference
// implementation the OpenMP path is tested against.
enum class Exec { serial, openmp };

// True when the openmp policy actually parallelizes in this build.
bool openmp_enabled();

template <typename Fn>
void for_each_index(Exec exec, int n, Fn&& fn) {
#if TREESHIFT_HAS_OPENMP
    if (exec == Exec::openmp) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
#else
    (void)exec;
#endif
    for (int i = 0; i < n; ++i) fn(i);
}

}  // namespace treeshift
