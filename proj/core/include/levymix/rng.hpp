#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string_view>

namespace levymix {

// SplitMix64 step; used only for deriving substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes);

// xoshiro256++; cheap enough for jump-heavy sampling loops where the
// generator call is a significant fraction of the draw cost.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ULL; }

  explicit Xoshiro256pp(std::uint64_t seed) {
    for (int i = 0; i < 4; ++i) s_[i] = splitmix64(seed);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9e3779b97f4a7c15ULL;
  }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

// One deterministic random substream, addressed by
// (master seed, purpose tag, replica index). Every worker owns its streams;
// nothing here is shared, so replicas can run on any thread in any order
// and still reproduce bit-identical draws.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::string_view purpose, std::uint64_t index = 0);

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on the open interval (0,1).
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal();  // standard normal (Box-Muller, pair cached)

  double exponential(double rate);  // rate > 0

  // Uniform direction on the unit sphere in R^dim, written to out[0..dim).
  void unit_vector(int dim, double* out);

  Xoshiro256pp& engine() { return gen_; }

 private:
  Xoshiro256pp gen_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

// Runs fn(replica) for replica in [0, replicas) on up to `threads` workers
// using static contiguous chunks. fn must touch only replica-owned state;
// callers reduce results in replica-index order so the outcome does not
// depend on the thread count.
void parallel_replicas(int replicas, int threads, const std::function<void(int)>& fn);

}  // namespace levymix
