#include "ssbft/sig_index.hpp"

#include <map>

#include "ssbft/env.hpp"

namespace ssbft {

namespace {

template <typename M, typename F>
std::map<Value, std::uint32_t> tally(std::span<const std::optional<SigField>> inbox, F&& key) {
  std::map<Value, std::uint32_t> counts;
  for (const auto& f : inbox) {
    if (!f) continue;
    const M* m = std::get_if<M>(&*f);
    if (!m) continue;
    if (auto k = key(*m)) ++counts[*k];
  }
  return counts;
}

}  // namespace

SigIndex::SigIndex(NodeId, std::uint32_t n, std::uint32_t t, std::uint32_t kappa,
                   std::uint64_t index_bound)
    : n_(n), t_(t), kappa_(kappa), bound_(index_bound) {
  if (kappa < 5) throw ParamError("SigIndex: kappa must be at least 5");
  if (index_bound == 0) throw ParamError("SigIndex: index bound must be positive");
}

std::optional<SigField> SigIndex::pulse(Phase phase,
                                        std::span<const std::optional<SigField>> inbox,
                                        MaybeValue mvc, Bit coin) {
  const std::uint32_t quorum = n_ - t_;

  if (phase == kappa_ - 4) return IndexMsg{index_};

  if (phase == kappa_ - 3) {
    auto counts = tally<IndexMsg>(inbox, [](const IndexMsg& m) -> MaybeValue { return m.value; });
    propose_.reset();
    for (const auto& [v, c] : counts) {
      if (c >= quorum) propose_ = v;
    }
    return ProposeMsg{propose_};
  }

  if (phase == kappa_ - 2) {
    auto counts = tally<ProposeMsg>(inbox, [](const ProposeMsg& m) { return m.value; });
    MaybeValue save;
    for (const auto& [v, c] : counts) {
      if (2 * c > n_) save = v;
    }
    // The bit certifies that the adopted value itself reached a quorum.
    bit_ = (save && counts[*save] >= quorum) ? 1 : 0;
    save_ = save.value_or(0);
    return BitMsg{bit_};
  }

  if (phase == kappa_ - 1) {
    inc_ = (mvc && *mvc == 1) ? 1 : 0;
    auto counts = tally<BitMsg>(inbox, [](const BitMsg& m) -> MaybeValue {
      if (m.value > 1) return std::nullopt;
      return Value{m.value};
    });
    const std::uint64_t next = (save_ % bound_ + inc_) % bound_;
    if (counts[1] >= quorum) {
      index_ = next;
    } else if (counts[0] >= quorum) {
      index_ = 0;
    } else {
      index_ = (coin * next) % bound_;
    }
    return std::nullopt;
  }

  return std::nullopt;
}

std::optional<SigField> SigIndex::preview(Phase phase,
                                          std::span<const std::optional<SigField>> inbox) const {
  SigIndex copy = *this;
  return copy.pulse(phase, inbox, std::nullopt, 0);
}

void SigIndex::corrupt(Corruptor& c) {
  index_ = c.any_u64("sig.index");
  propose_ = c.any_maybe("sig.propose", bound_ * 2);
  save_ = c.any_u64("sig.save");
  bit_ = static_cast<Bit>(c.any_below("sig.bit", 2));
  inc_ = static_cast<Bit>(c.any_below("sig.inc", 2));
}

}  // namespace ssbft
