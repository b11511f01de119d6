#pragma once

#include <functional>
#include <optional>
#include <span>

#include "ssbft/eig.hpp"

namespace ssbft {

/// Synchronous multivalued consensus that restarts its embedded EIG instance at every
/// phase 0 and serves the previous run's decision as a floating output.
///
/// Phase schedule: 0 captures, restarts and proposes; 1..t relay; t+1 absorbs the last
/// level without sending. When kappa == t+1 the last level is absorbed at phase 0,
/// right before the capture.
class SsbftMvc {
 public:
  SsbftMvc(NodeId self, std::uint32_t n, std::uint32_t t, std::uint32_t kappa);

  // `input` is sampled at phase 0 after the capture, so it may read result().
  std::optional<CoField> pulse(Phase phase, std::span<const std::optional<CoField>> inbox,
                               const std::function<Value()>& input);

  MaybeValue result() const { return current_; }

  const EigConsensus& co() const { return co_; }
  EigConsensus& co() { return co_; }

  void corrupt(Corruptor& c);
  void set_result(MaybeValue v) { current_ = v; }

 private:
  std::uint32_t t_;
  std::uint32_t kappa_;
  MaybeValue current_;
  EigConsensus co_;
};

}  // namespace ssbft
