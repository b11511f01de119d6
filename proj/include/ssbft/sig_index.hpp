#pragma once

#include <optional>
#include <span>

#include "ssbft/messages.hpp"
#include "ssbft/rng.hpp"
#include "ssbft/types.hpp"

namespace ssbft {

/// Simultaneous increment-or-get index. Active at phases kappa-4..kappa-1; the index
/// only changes at phase kappa-1.
class SigIndex {
 public:
  SigIndex(NodeId self, std::uint32_t n, std::uint32_t t, std::uint32_t kappa,
           std::uint64_t index_bound);

  // Raw read; a corrupted value is only normalized at the next write.
  std::uint64_t get_index() const { return index_; }

  /// One round. `inbox` holds the previous phase's fields indexed by sender.
  /// `mvc` and `coin` are only consulted at phase kappa-1.
  std::optional<SigField> pulse(Phase phase, std::span<const std::optional<SigField>> inbox,
                                MaybeValue mvc, Bit coin);

  // Field this node would send at `phase`, without touching its state. Independent
  // of the coin.
  std::optional<SigField> preview(Phase phase,
                                  std::span<const std::optional<SigField>> inbox) const;

  MaybeValue propose_value() const { return propose_; }
  std::uint64_t save() const { return save_; }
  Bit bit() const { return bit_; }
  Bit inc() const { return inc_; }

  void set_index(std::uint64_t v) { index_ = v; }
  void corrupt(Corruptor& c);

 private:
  std::uint32_t n_;
  std::uint32_t t_;
  std::uint32_t kappa_;
  std::uint64_t bound_;

  std::uint64_t index_ = 0;
  MaybeValue propose_;
  std::uint64_t save_ = 0;
  Bit bit_ = 0;
  Bit inc_ = 0;
};

}  // namespace ssbft
