// Deterministic parallel reduction over a sample index range.
//
// The range [0, total) is cut into fixed-size chunks (independent of the
// worker count). Workers claim chunks from an atomic cursor, each chunk
// produces a partial result, and partials are merged in chunk order on the
// calling thread. With per-index random streams this makes every result
// bit-identical for any number of workers.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace phad {

inline constexpr std::uint64_t kDefaultChunk = 4096;

/// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  void add(const CompensatedSum& o) noexcept {
    add(o.sum_);
    add(o.comp_);
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Mean and standard error of a stream of reals.
class SampleStats {
 public:
  void add(double x) noexcept {
    ++count_;
    sum_.add(x);
    sum_sq_.add(x * x);
  }
  void merge(const SampleStats& o) noexcept {
    count_ += o.count_;
    sum_.add(o.sum_);
    sum_sq_.add(o.sum_sq_);
  }
  std::uint64_t count() const noexcept { return count_; }
  double mean() const noexcept { return count_ ? sum_.value() / static_cast<double>(count_) : 0.0; }
  double variance() const noexcept {
    if (count_ < 2) return 0.0;
    const double n = static_cast<double>(count_);
    const double m = mean();
    const double v = (sum_sq_.value() - n * m * m) / (n - 1.0);
    return v > 0.0 ? v : 0.0;
  }
  double std_error() const noexcept {
    return count_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(count_));
  }

 private:
  std::uint64_t count_ = 0;
  CompensatedSum sum_;
  CompensatedSum sum_sq_;
};

inline unsigned resolve_jobs(unsigned jobs) {
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1U;
}

/// Runs `body(begin, end) -> Partial` over fixed chunks of [0, total) and
/// folds the partials in chunk order with `merge(acc, partial)`.
template <class Partial, class Body, class Merge>
Partial chunked_reduce(std::uint64_t total, unsigned jobs, Body body, Merge merge,
                       std::uint64_t chunk = kDefaultChunk) {
  const std::uint64_t nchunks = total == 0 ? 0 : (total + chunk - 1) / chunk;
  std::vector<Partial> partials(nchunks);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(resolve_jobs(jobs), std::max<std::uint64_t>(nchunks, 1)));

  std::atomic<std::uint64_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto run = [&] {
    try {
      for (;;) {
        const std::uint64_t c = cursor.fetch_add(1);
        if (c >= nchunks) break;
        const std::uint64_t b = c * chunk;
        partials[c] = body(b, std::min(total, b + chunk));
      }
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
      cursor.store(nchunks);
    }
  };

  if (workers <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  Partial acc{};
  for (auto& p : partials) merge(acc, p);
  return acc;
}

/// Applies `body(i)` for every i in [0, total) across workers; no result.
template <class Body>
void parallel_for(std::uint64_t total, unsigned jobs, Body body,
                  std::uint64_t chunk = kDefaultChunk) {
  struct Nothing {};
  chunked_reduce<Nothing>(
      total, jobs,
      [&](std::uint64_t b, std::uint64_t e) {
        for (std::uint64_t i = b; i < e; ++i) body(i);
        return Nothing{};
      },
      [](Nothing&, const Nothing&) {}, chunk);
}

}  // namespace phad
