#include "ssbft/env.hpp"

#include <algorithm>
#include <sstream>

#include "ssbft/rng.hpp"

namespace ssbft {

namespace {

// Number of labels of an information-gathering tree of depth t+1 over n nodes.
double eig_tree_size(std::uint32_t n, std::uint32_t t) {
  double total = 0;
  double level = 1;
  for (std::uint32_t k = 0; k <= t && k < n; ++k) {
    level *= static_cast<double>(n - k);
    total += level;
  }
  return total;
}

constexpr double kMaxEigLabels = 1 << 20;

}  // namespace

std::uint32_t Params::default_kappa(std::uint32_t t, std::uint32_t log_size) {
  return std::max({t + 1, log_size, 5U});
}

Params Params::make(std::uint32_t n, std::uint32_t t, std::uint32_t index_num,
                    std::uint32_t log_size, std::uint64_t seed) {
  Params p;
  p.n = n;
  p.t = t;
  p.index_num = index_num;
  p.index_bound = index_num;
  p.log_size = log_size;
  p.kappa = default_kappa(t, log_size);
  p.seed = seed;
  return p;
}

bool Validation::violates(const std::string& rule) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.rule == rule; });
}

Validation params_validate(const Params& p) {
  Validation out;
  auto fail = [&](std::string rule, std::string detail) {
    out.violations.push_back({std::move(rule), std::move(detail)});
  };

  if (static_cast<std::uint64_t>(p.n) < 3ULL * p.t + 1) {
    std::ostringstream os;
    os << "n=" << p.n << " < 3t+1=" << 3ULL * p.t + 1;
    fail("n >= 3t+1", os.str());
  }
  if (p.kappa < 5) {
    fail("kappa >= 5", "kappa=" + std::to_string(p.kappa));
  }
  if (p.kappa < p.t + 1) {
    fail("kappa >= t+1", "kappa=" + std::to_string(p.kappa) + " t=" + std::to_string(p.t));
  }
  if (p.index_num < 2 || p.log_size > p.index_num - 2) {
    fail("logSize <= indexNum-2",
         "logSize=" + std::to_string(p.log_size) + " indexNum=" + std::to_string(p.index_num));
  }
  if (p.index_bound != p.index_num) {
    fail("I == indexNum",
         "I=" + std::to_string(p.index_bound) + " indexNum=" + std::to_string(p.index_num));
  }
  if (eig_tree_size(p.n, p.t) > kMaxEigLabels) {
    fail("eig tree size", "n=" + std::to_string(p.n) + " t=" + std::to_string(p.t) +
                              " exceeds the information-gathering tree bound");
  }

  if (p.kappa < p.t + 5) {
    out.warnings.push_back("kappa < t+5: consensus processing and index phases share rounds");
  }
  if (p.kappa != Params::default_kappa(p.t, p.log_size)) {
    out.warnings.push_back("kappa overridden (derived value is " +
                           std::to_string(Params::default_kappa(p.t, p.log_size)) + ")");
  }
  return out;
}

Phase clock_read(Round round, std::uint32_t kappa) {
  if (kappa == 0) throw ParamError("clock_read: kappa must be positive");
  return static_cast<Phase>(round % kappa);
}

Bit CoinOracle::draw(Round round) const {
  return static_cast<Bit>(mix64(mix64(seed_) ^ round) >> 63);
}

Bit rcc_draw(Round round, std::uint64_t seed) { return CoinOracle(seed).draw(round); }

}  // namespace ssbft
