#include "ssbft/cores.hpp"

#include <stdexcept>

namespace ssbft {

namespace {

constexpr std::uint8_t mask_of(Bit v) { return static_cast<std::uint8_t>(1U << v); }

}  // namespace

// ---------------------------------------------------------------------------
// StubLedger

void StubLedger::join(std::uint32_t slot, Round key, NodeId node, Bit proposal) {
  auto& entry = entries_[{slot, key}];
  entry.proposals.emplace(node, proposal);
}

std::optional<Bit> StubLedger::decide(std::uint32_t slot, Round key, NodeId node) {
  auto it = entries_.find({slot, key});
  if (it == entries_.end() || !it->second.proposals.contains(node)) return std::nullopt;
  auto& entry = it->second;
  if (!entry.decision) {
    std::size_t ones = 0;
    for (const auto& [id, v] : entry.proposals) ones += v;
    entry.decision = static_cast<Bit>(2 * ones > entry.proposals.size() ? 1 : 0);
  }
  return entry.decision;
}

std::optional<Bit> StubLedger::decision(std::uint32_t slot, Round key) const {
  auto it = entries_.find({slot, key});
  if (it == entries_.end()) return std::nullopt;
  return it->second.decision;
}

// ---------------------------------------------------------------------------
// DelayStubCore

DelayStubCore::DelayStubCore(NodeId self, std::uint32_t slot, std::shared_ptr<StubLedger> ledger)
    : self_(self), slot_(slot), ledger_(std::move(ledger)) {
  if (!ledger_) throw std::invalid_argument("DelayStubCore: null ledger");
}

void DelayStubCore::propose(Bit v) { proposal_ = v; }

CoreMessage DelayStubCore::step(std::span<const std::optional<CoreMessage>>,
                                const StepContext& ctx) {
  if (!proposal_) {
    if (is_initial()) return {};
    proposal_ = 0;  // leftover state without a proposal: re-propose the default
  }
  if (!registered_) {
    registered_ = true;
    key_ = ctx.round;
    ledger_->join(slot_, key_, self_, *proposal_);
    delay_ = ledger_->draw_delay();
    elapsed_ = 0;
    // Never decide in the joining round; other correct nodes may not have joined yet.
    return CoreMessage{0, 0, mask_of(*proposal_)};
  }
  delay_ = std::min(delay_, ledger_->dmax());
  if (!decided_ && !error_) {
    ++elapsed_;
    if (elapsed_ >= delay_) {
      decided_ = ledger_->decide(slot_, key_, self_);
      if (!decided_) error_ = true;
    }
  }
  return CoreMessage{elapsed_, 0, mask_of(*proposal_)};
}

ObjectResult DelayStubCore::decided() const {
  if (error_) return TransientError{};
  if (!decided_) return Bottom{};
  if (*decided_ > 1 || ledger_->decision(slot_, key_) != decided_) return TransientError{};
  return *decided_;
}

void DelayStubCore::reset() {
  proposal_.reset();
  registered_ = false;
  key_ = 0;
  elapsed_ = 0;
  delay_ = 0;
  decided_.reset();
  error_ = false;
}

bool DelayStubCore::is_initial() const {
  return !proposal_ && !registered_ && key_ == 0 && elapsed_ == 0 && delay_ == 0 && !decided_ &&
         !error_;
}

void DelayStubCore::corrupt(Corruptor& c) {
  auto p = c.any_maybe("stub.proposal", 2);
  proposal_ = p ? std::optional<Bit>(static_cast<Bit>(*p)) : std::nullopt;
  registered_ = c.any_bool("stub.registered");
  key_ = c.any_u64("stub.key");
  elapsed_ = static_cast<std::uint32_t>(c.any_u64("stub.elapsed"));
  delay_ = static_cast<std::uint32_t>(c.any_u64("stub.delay"));
  auto d = c.any_maybe("stub.decided", 2);
  decided_ = d ? std::optional<Bit>(static_cast<Bit>(*d)) : std::nullopt;
  error_ = c.any_bool("stub.error");
}

// ---------------------------------------------------------------------------
// MmrLiteCore

MmrLiteCore::MmrLiteCore(NodeId self, std::uint32_t n, std::uint32_t t)
    : self_(self), n_(n), t_(t) {}

void MmrLiteCore::propose(Bit v) {
  proposal_ = v;
  est_ = v;
}

CoreMessage MmrLiteCore::step(std::span<const std::optional<CoreMessage>> inbox,
                              const StepContext& ctx) {
  if (!proposal_) {
    if (is_initial()) return {};
    proposal_ = 0;
    est_ = 0;
  }
  if (error_) return {};
  stage_ %= 3;
  est_ &= 1;
  bin_values_ &= 3;

  if (!started_) {
    started_ = true;
    stage_ = kRelay;
    return CoreMessage{round_, kEst, mask_of(est_)};
  }

  const auto prev_stage = static_cast<std::uint8_t>((stage_ + 2) % 3);
  const std::uint32_t prev_round = stage_ == kEst ? round_ - 1 : round_;

  std::uint32_t matching = 0;
  std::uint32_t support[2] = {0, 0};
  for (const auto& m : inbox) {
    if (!m || m->round != prev_round || m->stage != prev_stage) continue;
    ++matching;
    for (Bit v = 0; v < 2; ++v) support[v] += (m->mask & mask_of(v)) ? 1 : 0;
  }
  if (matching < n_ - t_) {
    if (++stall_ > kStallLimit) {
      error_ = true;
      return {};
    }
  } else {
    stall_ = 0;
  }

  switch (prev_stage) {
    case kEst: {
      std::uint8_t relay = mask_of(est_);
      for (Bit v = 0; v < 2; ++v) {
        if (support[v] >= t_ + 1) relay |= mask_of(v);
      }
      stage_ = kAux;
      return CoreMessage{round_, kRelay, relay};
    }
    case kRelay: {
      bin_values_ = 0;
      for (Bit v = 0; v < 2; ++v) {
        if (support[v] >= 2 * t_ + 1) bin_values_ |= mask_of(v);
      }
      std::uint8_t aux = 0;
      if (bin_values_ & mask_of(est_)) {
        aux = mask_of(est_);
      } else if (bin_values_ != 0) {
        aux = mask_of(static_cast<Bit>(1 - est_));
      }
      stage_ = kEst;
      ++round_;
      return CoreMessage{round_ - 1, kAux, aux};
    }
    default: {
      // AUX of round_-1: only single-valued AUX messages whose value is justified count.
      std::uint32_t valid = 0;
      std::uint8_t vals = 0;
      for (const auto& m : inbox) {
        if (!m || m->round != prev_round || m->stage != kAux) continue;
        if ((m->mask == 1 || m->mask == 2) && (m->mask & bin_values_)) {
          ++valid;
          vals |= m->mask;
        }
      }
      if (valid >= n_ - t_ && (vals == 1 || vals == 2)) {
        const Bit v = vals == 1 ? 0 : 1;
        est_ = v;
        if (v == ctx.coin && !decided_) decided_ = v;
      } else {
        est_ = ctx.coin;
      }
      stage_ = kRelay;
      return CoreMessage{round_, kEst, mask_of(est_)};
    }
  }
}

ObjectResult MmrLiteCore::decided() const {
  if (error_) return TransientError{};
  if (decided_) {
    if (*decided_ > 1) return TransientError{};
    return *decided_;
  }
  return Bottom{};
}

void MmrLiteCore::reset() {
  proposal_.reset();
  est_ = 0;
  round_ = 0;
  stage_ = kEst;
  started_ = false;
  bin_values_ = 0;
  decided_.reset();
  error_ = false;
  stall_ = 0;
}

bool MmrLiteCore::is_initial() const {
  return !proposal_ && est_ == 0 && round_ == 0 && stage_ == kEst && !started_ &&
         bin_values_ == 0 && !decided_ && !error_ && stall_ == 0;
}

void MmrLiteCore::corrupt(Corruptor& c) {
  auto p = c.any_maybe("mmr.proposal", 2);
  proposal_ = p ? std::optional<Bit>(static_cast<Bit>(*p)) : std::nullopt;
  est_ = static_cast<Bit>(c.any_below("mmr.est", 2));
  round_ = static_cast<std::uint32_t>(c.any_u64("mmr.round"));
  stage_ = static_cast<std::uint8_t>(c.any_below("mmr.stage", 3));
  started_ = c.any_bool("mmr.started");
  bin_values_ = static_cast<std::uint8_t>(c.any_below("mmr.bin_values", 4));
  auto d = c.any_maybe("mmr.decided", 2);
  decided_ = d ? std::optional<Bit>(static_cast<Bit>(*d)) : std::nullopt;
  error_ = c.any_bool("mmr.error");
  stall_ = static_cast<std::uint32_t>(c.any_below("mmr.stall", kStallLimit + 1));
}

}  // namespace ssbft
