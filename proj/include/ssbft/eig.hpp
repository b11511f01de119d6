#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ssbft/messages.hpp"
#include "ssbft/rng.hpp"
#include "ssbft/types.hpp"

namespace ssbft {

// All sequences of `length` distinct ids from {0..n-1}, in lexicographic order.
std::vector<Label> eig_labels(std::uint32_t n, std::uint32_t length);

/// Exponential information gathering Byzantine agreement, driven one synchronous round
/// at a time. After restart() and propose(), t further calls of process() relay the
/// tree level by level and a final process() absorbs level t+1; result() is then
/// the resolved root value.
class EigConsensus {
 public:
  EigConsensus(NodeId self, std::uint32_t n, std::uint32_t t);

  void restart();
  // The returned field is broadcast to every node.
  std::optional<CoField> propose(Value v);
  // inbox is indexed by sender.
  std::optional<CoField> process(std::span<const std::optional<CoField>> inbox);
  // ⊥ until all t+1 levels have been absorbed.
  MaybeValue result() const;

  std::uint32_t levels() const { return levels_; }
  bool proposed() const { return proposed_; }
  const std::map<Label, MaybeValue>& tree() const { return tree_; }

  void corrupt(Corruptor& c);
  // Completed run whose tree resolves to v everywhere.
  void force_decided(Value v);

 private:
  std::optional<CoField> relay() const;
  MaybeValue resolve(Label& label) const;

  NodeId self_;
  std::uint32_t n_;
  std::uint32_t t_;
  bool proposed_ = false;
  std::uint32_t levels_ = 0;  // tree levels absorbed so far
  std::map<Label, MaybeValue> tree_;
};

}  // namespace ssbft
