#include "tuner/analyzer.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace tuner {

double outcome_wall_time(const analysis_outcome &o) {
  return std::visit([](const auto &x) { return x.wall_time; }, o);
}

void normalize_alarms(std::vector<alarm_id> &alarms) {
  std::sort(alarms.begin(), alarms.end());
  alarms.erase(std::unique(alarms.begin(), alarms.end()), alarms.end());
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)> &body) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i)
      body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure)
            failure = std::current_exception();
        }
      }
    });
  }
  for (auto &t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace tuner
