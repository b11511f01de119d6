#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssbft/types.hpp"

namespace ssbft {

class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Global protocol parameters shared by every node of a run.
///
/// `index_bound` (I) is the number of states of the agreed index; the recycler
/// slides its window modulo `index_num`, so the two must coincide.
struct Params {
  std::uint32_t n = 4;
  std::uint32_t t = 1;
  std::uint32_t kappa = 5;
  std::uint64_t index_bound = 8;
  std::uint32_t index_num = 8;
  std::uint32_t log_size = 3;
  std::uint64_t seed = 0;

  // Smallest legal cycle length for (t, log_size): max(t+1, log_size), lifted to 5
  // because the index protocol needs four distinct phases plus phase 0.
  static std::uint32_t default_kappa(std::uint32_t t, std::uint32_t log_size);

  // Builds parameters with kappa and I derived from the others.
  static Params make(std::uint32_t n, std::uint32_t t, std::uint32_t index_num,
                     std::uint32_t log_size, std::uint64_t seed = 0);

  std::uint32_t quorum() const { return n - t; }
};

struct Violation {
  std::string rule;
  std::string detail;
};

struct Validation {
  std::vector<Violation> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
  bool violates(const std::string& rule) const;
};

Validation params_validate(const Params& p);

/// Phase of the kappa-state global clock in `round`. Identical at every node.
Phase clock_read(Round round, std::uint32_t kappa);

struct CoinRecord {
  Round round = 0;
  Bit value = 0;
  bool enabling = true;
};

/// Random common coin: a deterministic function of (seed, round), uniform over {0,1},
/// revealed to all correct nodes in the same round. The default oracle is always
/// enabling.
class CoinOracle {
 public:
  explicit CoinOracle(std::uint64_t seed) : seed_(seed) {}

  Bit draw(Round round) const;
  CoinRecord reveal(Round round) const { return {round, draw(round), true}; }

 private:
  std::uint64_t seed_;
};

// Convenience wrapper matching the free-function form of the coin service.
Bit rcc_draw(Round round, std::uint64_t seed);

}  // namespace ssbft
