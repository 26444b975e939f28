#include "sdelab/parallel.hpp"

#include <atomic>

namespace sdelab::par {

namespace {
std::atomic<int> g_threads{0};
}

void set_threads(int threads) { g_threads.store(threads < 0 ? 0 : threads); }

int threads() { return g_threads.load(); }

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace sdelab::par
