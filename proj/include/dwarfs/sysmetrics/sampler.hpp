#pragma once

#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "dwarfs/sysmetrics/snapshot.hpp"

namespace dwarfs::sysmetrics {

/// Owns a provider on a background thread and appends one snapshot per
/// cadence. start() and stop() each record a snapshot synchronously, so a
/// stopped sampler always holds at least two entries unless the provider
/// failed.
class Sampler {
 public:
  explicit Sampler(CounterProvider& provider, double cadence_seconds = 1.0);
  ~Sampler();
  Sampler(const Sampler&) = delete;
  Sampler& operator=(const Sampler&) = delete;

  void start();
  void stop();

  /// Completed snapshots so far.
  std::vector<SystemSnapshot> series() const;
  /// First provider failure, rethrown; no-op when sampling succeeded.
  void rethrow_if_failed() const;
  bool failed() const;

 private:
  void loop(std::stop_token st);
  void take();

  CounterProvider& provider_;
  double cadence_;
  mutable std::mutex mu_;
  std::condition_variable_any cv_;
  std::vector<SystemSnapshot> series_;
  std::exception_ptr error_;
  std::jthread thread_;
};

}  // namespace dwarfs::sysmetrics
