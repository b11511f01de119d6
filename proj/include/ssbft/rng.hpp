#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ssbft/types.hpp"

namespace ssbft {

// splitmix64 finalizer; used to derive independent streams from one trial seed.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream tags so that adversary, workload and injector draws never share state.
enum class Stream : std::uint64_t {
  kAdversary = 1,
  kWorkload = 2,
  kInjector = 3,
  kStubDelay = 4,
  kByzSet = 5,
};

inline std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t extra = 0) {
  return mix64(mix64(seed ^ (static_cast<std::uint64_t>(stream) << 56)) + extra);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [lo, hi].
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(engine_);
  }
  Bit bit() { return static_cast<Bit>(engine_() & 1U); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_) < p; }

 private:
  std::mt19937_64 engine_;
};

// Source of arbitrary values for transient-fault injection. Every replacement is
// logged as "node/field=value" so a corruption map can be replayed or inspected.
class Corruptor {
 public:
  explicit Corruptor(std::uint64_t seed) : rng_(seed) {}

  Rng& rng() { return rng_; }
  void set_scope(std::string scope) { scope_ = std::move(scope); }

  std::uint64_t any_u64(const char* field) {
    auto v = rng_.next();
    note(field, std::to_string(v));
    return v;
  }
  std::uint64_t any_below(const char* field, std::uint64_t bound) {
    auto v = bound == 0 ? 0 : rng_.uniform(0, bound - 1);
    note(field, std::to_string(v));
    return v;
  }
  bool any_bool(const char* field) {
    bool v = rng_.bit() != 0;
    note(field, v ? "1" : "0");
    return v;
  }
  // A value in [0, bound) or ⊥ with probability 1/4.
  MaybeValue any_maybe(const char* field, std::uint64_t bound) {
    if (rng_.uniform(0, 3) == 0) {
      note(field, "bot");
      return std::nullopt;
    }
    return any_below(field, bound);
  }

  const std::vector<std::string>& log() const { return log_; }

 private:
  void note(const char* field, const std::string& value) {
    log_.push_back(scope_ + "/" + field + "=" + value);
  }

  Rng rng_;
  std::string scope_;
  std::vector<std::string> log_;
};

}  // namespace ssbft
