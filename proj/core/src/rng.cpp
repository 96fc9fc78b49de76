#include "levymix/rng.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

namespace levymix {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {
std::uint64_t splitmix_mix(std::uint64_t master, std::uint64_t purpose, std::uint64_t index) {
  std::uint64_t s = master;
  s = splitmix64(s) ^ purpose;
  s = splitmix64(s) ^ (index * 0x9e3779b97f4a7c15ULL + 1);
  return splitmix64(s);
}
}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::string_view purpose, std::uint64_t index)
    // The SplitMix64 chain inside the engine constructor expands the mixed
    // address triple into the full generator state.
    : gen_(splitmix_mix(master_seed, fnv1a64(purpose), index)) {}

double RngStream::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

double RngStream::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
  return -std::log(uniform()) / rate;
}

void RngStream::unit_vector(int dim, double* out) {
  if (dim == 1) {
    out[0] = uniform() < 0.5 ? -1.0 : 1.0;
    return;
  }
  double nrm2 = 0.0;
  do {
    nrm2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      out[i] = normal();
      nrm2 += out[i] * out[i];
    }
  } while (nrm2 < 1e-280);
  const double inv = 1.0 / std::sqrt(nrm2);
  for (int i = 0; i < dim; ++i) out[i] *= inv;
}

void parallel_replicas(int replicas, int threads, const std::function<void(int)>& fn) {
  if (replicas <= 0) return;
  if (threads < 1) threads = 1;
  const int workers = std::min(threads, replicas);
  if (workers == 1) {
    for (int r = 0; r < replicas; ++r) fn(r);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex err_mu;
  const int chunk = (replicas + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int lo = w * chunk;
    const int hi = std::min(replicas, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (int r = lo; r < hi; ++r) fn(r);
      } catch (...) {
        std::lock_guard<std::mutex> g(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace levymix
