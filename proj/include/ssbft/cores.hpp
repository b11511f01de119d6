#pragma once

#include <map>
#include <memory>
#include <optional>
#include <utility>

#include "ssbft/recyclable_object.hpp"

namespace ssbft {

/// Shared decision book for DelayStubCore. An instance is keyed by (slot, round of
/// the first step after proposing); correct nodes that propose into the same slot in
/// the same round share one instance. The first decision fixes the majority of the
/// proposals registered so far (ties go to 0).
class StubLedger {
 public:
  StubLedger(std::uint32_t dmax, std::uint64_t seed) : dmax_(dmax), delays_(seed) {}

  std::uint32_t dmax() const { return dmax_; }

  void join(std::uint32_t slot, Round key, NodeId node, Bit proposal);
  // nullopt when the caller never joined this instance.
  std::optional<Bit> decide(std::uint32_t slot, Round key, NodeId node);
  std::optional<Bit> decision(std::uint32_t slot, Round key) const;

  // Adversary-chosen delay in [0, dmax].
  std::uint32_t draw_delay() { return static_cast<std::uint32_t>(delays_.uniform(0, dmax_)); }

  std::size_t instances() const { return entries_.size(); }

 private:
  struct Entry {
    std::map<NodeId, Bit> proposals;
    std::optional<Bit> decision;
  };

  std::uint32_t dmax_;
  Rng delays_;
  std::map<std::pair<std::uint32_t, Round>, Entry> entries_;
};

/// Test double for the asynchronous core: decides the ledger's value after a bounded
/// delay. A local decision that disagrees with the ledger reports the error symbol.
class DelayStubCore final : public AsyncCore {
 public:
  DelayStubCore(NodeId self, std::uint32_t slot, std::shared_ptr<StubLedger> ledger);

  void propose(Bit v) override;
  std::optional<Bit> proposal() const override { return proposal_; }
  CoreMessage step(std::span<const std::optional<CoreMessage>> inbox,
                   const StepContext& ctx) override;
  ObjectResult decided() const override;
  void reset() override;
  bool is_initial() const override;
  void corrupt(Corruptor& c) override;
  std::unique_ptr<AsyncCore> clone() const override {
    return std::make_unique<DelayStubCore>(*this);
  }

 private:
  NodeId self_;
  std::uint32_t slot_;
  std::shared_ptr<StubLedger> ledger_;

  std::optional<Bit> proposal_;
  bool registered_ = false;
  Round key_ = 0;
  std::uint32_t elapsed_ = 0;
  std::uint32_t delay_ = 0;
  std::optional<Bit> decided_;
  bool error_ = false;
};

/// Small coin-based binary consensus in the style of Mostefaoui-Moumen-Raynal, run in
/// lock step: each round is EST, RELAY (bounded broadcast of values with t+1 support)
/// and AUX, followed by the coin. Nodes keep participating after they decide.
/// Prolonged absence of a quorum of aligned messages is reported as a transient error.
class MmrLiteCore final : public AsyncCore {
 public:
  static constexpr std::uint32_t kStallLimit = 6;

  enum Stage : std::uint8_t { kEst = 0, kRelay = 1, kAux = 2 };

  MmrLiteCore(NodeId self, std::uint32_t n, std::uint32_t t);

  void propose(Bit v) override;
  std::optional<Bit> proposal() const override { return proposal_; }
  CoreMessage step(std::span<const std::optional<CoreMessage>> inbox,
                   const StepContext& ctx) override;
  ObjectResult decided() const override;
  void reset() override;
  bool is_initial() const override;
  void corrupt(Corruptor& c) override;
  std::unique_ptr<AsyncCore> clone() const override {
    return std::make_unique<MmrLiteCore>(*this);
  }

  Bit estimate() const { return est_; }
  std::uint32_t round() const { return round_; }

 private:
  NodeId self_;
  std::uint32_t n_;
  std::uint32_t t_;

  std::optional<Bit> proposal_;
  Bit est_ = 0;
  std::uint32_t round_ = 0;
  std::uint8_t stage_ = kEst;  // stage of the next message to send
  bool started_ = false;
  std::uint8_t bin_values_ = 0;
  std::optional<Bit> decided_;
  bool error_ = false;
  std::uint32_t stall_ = 0;
};

enum class CoreKind { kStub, kMmrLite };

}  // namespace ssbft
