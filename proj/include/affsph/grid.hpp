#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "affsph/errors.hpp"
#include "affsph/smooth_map.hpp"

namespace affsph {

/// Cell-centred tensor grid over a box. Points never touch the box boundary,
/// and the grid with 3n cells per axis contains the grid with n cells.
class Grid {
 public:
  Grid() = default;
  Grid(Box box, std::vector<int> counts) : box_(std::move(box)), counts_(std::move(counts)) {
    if (static_cast<int>(counts_.size()) != box_.dim()) {
      throw InvalidArgument("grid needs one count per axis (got " + std::to_string(counts_.size()) +
                            " for " + std::to_string(box_.dim()) + " axes)");
    }
    for (int c : counts_) {
      if (c < 1) throw InvalidArgument("grid counts must be positive");
    }
  }

  static Grid uniform(const Box& box, int n) { return Grid(box, std::vector<int>(box.dim(), n)); }

  const Box& box() const { return box_; }
  const std::vector<int>& counts() const { return counts_; }
  int dim() const { return box_.dim(); }

  std::size_t size() const {
    std::size_t n = 1;
    for (int c : counts_) n *= static_cast<std::size_t>(c);
    return n;
  }

  /// k-th point in row-major order (last axis fastest).
  std::vector<double> point(std::size_t k) const {
    std::vector<double> p(counts_.size());
    for (std::size_t ax = counts_.size(); ax-- > 0;) {
      const int n = counts_[ax];
      const std::size_t i = k % n;
      k /= n;
      const auto [lo, hi] = box_.range(static_cast<int>(ax));
      p[ax] = lo + (static_cast<double>(i) + 0.5) * (hi - lo) / n;
    }
    return p;
  }

 private:
  Box box_;
  std::vector<int> counts_;
};

/// Worker count from AFFSPH_THREADS (default: hardware concurrency).
inline unsigned thread_count() {
  if (const char* env = std::getenv("AFFSPH_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// out[i] = fn(i) for i in [0, n). Results are stored by index, so the output
/// does not depend on the number of workers.
template <class Fn>
auto parallel_map(std::size_t n, Fn fn) -> std::vector<decltype(fn(std::size_t{0}))> {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(n);
  const unsigned workers = std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace affsph
