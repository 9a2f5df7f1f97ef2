#include "kurastab/parallel.hpp"

#include <atomic>

namespace kurastab {

namespace {
std::atomic<unsigned> job_cap{0};
}

void set_max_jobs(unsigned jobs) { job_cap = jobs; }

unsigned max_jobs() {
    const unsigned cap = job_cap;
    if (cap > 0) return cap;
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace kurastab
