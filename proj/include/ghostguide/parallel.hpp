#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ghostguide {

/// out[i] = f(xs[i]) with the grid split into contiguous blocks across
/// `workers` threads. Each value is computed independently, so the result
/// does not depend on the worker count.
template <class F>
std::vector<double> evaluate_grid(const F& f, const std::vector<double>& xs, unsigned workers = 1) {
    std::vector<double> out(xs.size());
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(xs.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            out[i] = f(xs[i]);
        }
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    const std::size_t block = (xs.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::size_t end = std::min(xs.size(), (w + 1) * block);
                for (std::size_t i = w * block; i < end; ++i) {
                    out[i] = f(xs[i]);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

/// n equally spaced points covering [lo, hi], endpoints included.
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
    std::vector<double> xs(n);
    if (n == 1) {
        xs[0] = 0.5 * (lo + hi);
        return xs;
    }
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    xs.back() = hi;
    return xs;
}

}  // namespace ghostguide
