#pragma once

// Replication-level kernels. Every parallel loop in the library goes through
// for_each_index, which writes result r into slot r; reductions then run over
// the slots in a fixed pairwise order. Output is therefore independent of the
// thread count and of the backend.

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sdelab::par {

enum class Backend { serial, openmp };

/// Thread count used by the openmp backend; 0 means the OpenMP default.
void set_threads(int threads);
int threads();

/// Pairwise (cascade) summation with a fixed split at the midpoint.
double pairwise_sum(std::span<const double> values);

/// Serial reference loop.
template <class Fn>
void for_each_index_serial(std::size_t count, Fn&& fn) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
}

template <class Fn>
void for_each_index_openmp(std::size_t count, Fn&& fn) {
#ifdef _OPENMP
    const int nt = threads();
    const auto n = static_cast<long long>(count);
    std::exception_ptr failure;
    std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic, 16) num_threads(nt > 0 ? nt : omp_get_max_threads())
    for (long long i = 0; i < n; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
#else
    for_each_index_serial(count, fn);
#endif
}

template <class Fn>
void for_each_index(std::size_t count, Fn&& fn, Backend backend = Backend::openmp) {
    if (backend == Backend::serial)
        for_each_index_serial(count, fn);
    else
        for_each_index_openmp(count, fn);
}

}  // namespace sdelab::par
