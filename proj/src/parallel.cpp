#include "segrekin/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "segrekin/error.hpp"

namespace segrekin {

namespace {

std::mutex g_warn_mutex;
std::vector<std::string> g_warnings;

int threads_from_env() {
  if (const char* s = std::getenv("SEGREKIN_THREADS")) {
    int n = std::atoi(s);
    if (n > 0) return n;
  }
  return 1;
}

class Pool {
 public:
  ~Pool() { resize(0); }

  void resize(int workers) {
    {
      std::unique_lock lk(m_);
      stop_ = true;
      ++generation_;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
    threads_.clear();
    stop_ = false;
    std::uint64_t gen = generation_;
    for (int i = 0; i < workers; ++i) threads_.emplace_back([this, gen] { loop(gen); });
  }

  int workers() const { return static_cast<int>(threads_.size()); }

  void run(const ChunkPlan& plan, const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    std::unique_lock run_lock(run_mutex_);
    {
      std::unique_lock lk(m_);
      body_ = &body;
      plan_ = plan;
      next_.store(0);
      active_ = static_cast<int>(threads_.size());
      error_ = nullptr;
      ++generation_;
    }
    cv_.notify_all();
    work();
    std::unique_lock lk(m_);
    done_cv_.wait(lk, [this] { return active_ == 0; });
    body_ = nullptr;
    if (error_) std::rethrow_exception(error_);
  }

 private:
  void work() {
    for (;;) {
      std::size_t c = next_.fetch_add(1);
      if (c >= plan_.count) return;
      try {
        (*body_)(c, plan_.begin(c), plan_.end(c));
      } catch (...) {
        std::unique_lock lk(m_);
        if (!error_) error_ = std::current_exception();
      }
    }
  }

  void loop(std::uint64_t seen) {
    for (;;) {
      {
        std::unique_lock lk(m_);
        cv_.wait(lk, [&] { return generation_ != seen; });
        seen = generation_;
        if (stop_) return;
      }
      work();
      std::unique_lock lk(m_);
      if (--active_ == 0) done_cv_.notify_all();
    }
  }

  std::vector<std::thread> threads_;
  std::mutex m_;
  std::mutex run_mutex_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
  const std::function<void(std::size_t, std::size_t, std::size_t)>* body_ = nullptr;
  ChunkPlan plan_;
  std::atomic<std::size_t> next_{0};
  int active_ = 0;
  std::exception_ptr error_;
};

std::mutex g_pool_mutex;
int g_threads = threads_from_env();
Pool& pool() {
  static Pool p;
  return p;
}

thread_local bool t_inside = false;

}  // namespace

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ok: return "ok";
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::GridMismatch: return "grid_mismatch";
    case ErrorCode::StabilityViolation: return "stability_violation";
    case ErrorCode::NotConverged: return "not_converged";
    case ErrorCode::Positivity: return "positivity";
    case ErrorCode::Io: return "io";
    case ErrorCode::Config: return "config";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

void emit_warning(const std::string& message) {
  std::lock_guard lk(g_warn_mutex);
  if (g_warnings.size() < 1000) g_warnings.push_back(message);
}

std::vector<std::string> take_warnings() {
  std::lock_guard lk(g_warn_mutex);
  std::vector<std::string> out;
  out.swap(g_warnings);
  return out;
}

void set_num_threads(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "thread count must be >= 1");
  std::lock_guard lk(g_pool_mutex);
  g_threads = n;
}

int num_threads() {
  std::lock_guard lk(g_pool_mutex);
  return g_threads;
}

ChunkPlan plan_chunks(std::size_t n, std::size_t grain) {
  ChunkPlan p;
  p.n = n;
  p.chunk = std::max<std::size_t>(grain, 1);
  p.count = (n + p.chunk - 1) / p.chunk;
  return p;
}

void parallel_chunks(const ChunkPlan& plan,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  if (plan.count == 0) return;
  int threads = t_inside ? 1 : num_threads();
  if (threads <= 1 || plan.count == 1) {
    for (std::size_t c = 0; c < plan.count; ++c) body(c, plan.begin(c), plan.end(c));
    return;
  }
  std::lock_guard lk(g_pool_mutex);
  Pool& p = pool();
  if (p.workers() != threads - 1) p.resize(threads - 1);
  auto wrapped = [&](std::size_t c, std::size_t b, std::size_t e) {
    bool prev = t_inside;
    t_inside = true;
    try {
      body(c, b, e);
    } catch (...) {
      t_inside = prev;
      throw;
    }
    t_inside = prev;
  };
  p.run(plan, wrapped);
}

void parallel_for(std::size_t n, std::size_t grain, const std::function<void(std::size_t, std::size_t)>& body) {
  parallel_chunks(plan_chunks(n, grain), [&](std::size_t, std::size_t b, std::size_t e) { body(b, e); });
}

double parallel_sum(std::size_t n, std::size_t grain, const std::function<double(std::size_t, std::size_t)>& partial) {
  ChunkPlan plan = plan_chunks(n, grain);
  std::vector<double> parts(plan.count, 0.0);
  parallel_chunks(plan, [&](std::size_t c, std::size_t b, std::size_t e) { parts[c] = partial(b, e); });
  double s = 0.0;
  for (double v : parts) s += v;
  return s;
}

}  // namespace segrekin
