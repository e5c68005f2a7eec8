#include "dwarfs/sysmetrics/sampler.hpp"

#include <chrono>

#include "dwarfs/common/error.hpp"

namespace dwarfs::sysmetrics {

Sampler::Sampler(CounterProvider& provider, double cadence_seconds)
    : provider_(provider), cadence_(cadence_seconds) {
  if (!(cadence_seconds > 0.0)) throw InvalidArgument("sampler cadence must be positive");
}

Sampler::~Sampler() { stop(); }

void Sampler::take() {
  try {
    auto s = provider_.snapshot();
    std::lock_guard lock(mu_);
    series_.push_back(s);
  } catch (...) {
    std::lock_guard lock(mu_);
    if (!error_) error_ = std::current_exception();
  }
}

void Sampler::start() {
  if (thread_.joinable()) return;
  take();
  thread_ = std::jthread([this](std::stop_token st) { loop(st); });
}

void Sampler::stop() {
  if (!thread_.joinable()) return;
  thread_.request_stop();
  cv_.notify_all();
  thread_.join();
  take();
}

void Sampler::loop(std::stop_token st) {
  const auto period = std::chrono::duration<double>(cadence_);
  auto next = std::chrono::steady_clock::now() +
              std::chrono::duration_cast<std::chrono::steady_clock::duration>(period);
  while (!st.stop_requested()) {
    {
      std::unique_lock lock(mu_);
      if (cv_.wait_until(lock, st, next, [] { return false; }) || st.stop_requested()) return;
    }
    take();
    next += std::chrono::duration_cast<std::chrono::steady_clock::duration>(period);
    if (failed()) return;
  }
}

std::vector<SystemSnapshot> Sampler::series() const {
  std::lock_guard lock(mu_);
  return series_;
}

bool Sampler::failed() const {
  std::lock_guard lock(mu_);
  return error_ != nullptr;
}

void Sampler::rethrow_if_failed() const {
  std::exception_ptr e;
  {
    std::lock_guard lock(mu_);
    e = error_;
  }
  if (e) std::rethrow_exception(e);
}

}  // namespace dwarfs::sysmetrics
