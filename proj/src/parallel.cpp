#include "wig/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "wig/types.hpp"

namespace wig {

namespace {
std::atomic<int> g_threads{0};
}

const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::SingularL: return "SingularL";
    case ErrorCode::OddDimension: return "OddDimension";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::OffLattice: return "OffLattice";
    case ErrorCode::OrderTooHigh: return "OrderTooHigh";
    case ErrorCode::ZeroWindow: return "ZeroWindow";
    case ErrorCode::LatticeMismatch: return "LatticeMismatch";
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::FactorizationFailed: return "FactorizationFailed";
    case ErrorCode::BadExponent: return "BadExponent";
    case ErrorCode::UnsupportedWeight: return "UnsupportedWeight";
    case ErrorCode::KernelTooLarge: return "KernelTooLarge";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::IllConditionedS: return "IllConditionedS";
    case ErrorCode::UnstableStep: return "UnstableStep";
    case ErrorCode::NotHamiltonian: return "NotHamiltonian";
    case ErrorCode::NotSymplectic: return "NotSymplectic";
    case ErrorCode::IO: return "IO";
    case ErrorCode::FormatVersion: return "FormatVersion";
    case ErrorCode::Usage: return "Usage";
    case ErrorCode::UnknownSuite: return "UnknownSuite";
  }
  return "Error";
}

void set_threads(int n) { g_threads = std::max(0, n); }

int threads() {
  int n = g_threads.load();
  if (n > 0) return n;
  if (const char* env = std::getenv("WIG_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads()), count);
  if (nt <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < count; i = next++) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace wig
