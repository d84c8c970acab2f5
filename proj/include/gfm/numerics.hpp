#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>

namespace gfm {

struct Bracket {
    double lo;
    double hi;
};

/// Bisection on [lo, hi] where f(lo) and f(hi) have opposite signs (a zero endpoint is returned
/// directly). Stops once the bracket is narrower than tol, then takes one false-position step
/// inside the final bracket. Returns std::nullopt when the endpoints do not bracket a root.
std::optional<double> bisect(const std::function<double(double)>& f, Bracket b, double tol,
                             int max_iter = 200);

/// Number of worker threads: GFM_TRANSTAB_THREADS when set to a positive integer, else the
/// hardware concurrency (at least 1).
unsigned worker_count();

/// Runs body(i) for i in [0, n) across worker_count() threads. Exceptions from any worker are
/// rethrown on the caller (the one with the lowest index wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gfm
