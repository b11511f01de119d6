#pragma once

#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "ssbft/messages.hpp"
#include "ssbft/rng.hpp"
#include "ssbft/types.hpp"

namespace ssbft {

struct Bottom {
  bool operator==(const Bottom&) const = default;
};
// The transient error symbol: the incarnation detected an internal inconsistency.
struct TransientError {
  bool operator==(const TransientError&) const = default;
};

using ObjectResult = std::variant<Bottom, Bit, TransientError>;

inline bool is_bottom(const ObjectResult& r) { return std::holds_alternative<Bottom>(r); }

struct StepContext {
  Round round = 0;
  Bit coin = 0;
};

/// Contract for the asynchronous binary-consensus algorithm wrapped by a recyclable
/// object. Implementations must provide validity and agreement among correct nodes and
/// must reach a decision (or report an error) from any starting state.
class AsyncCore {
 public:
  virtual ~AsyncCore() = default;

  virtual void propose(Bit v) = 0;
  virtual std::optional<Bit> proposal() const = 0;
  // inbox is indexed by sender; an absent entry means nothing arrived for this object.
  virtual CoreMessage step(std::span<const std::optional<CoreMessage>> inbox,
                           const StepContext& ctx) = 0;
  virtual ObjectResult decided() const = 0;
  virtual void reset() = 0;
  virtual bool is_initial() const = 0;
  virtual void corrupt(Corruptor& c) = 0;
  virtual std::unique_ptr<AsyncCore> clone() const = 0;
};

/// Recyclability layer around an asynchronous consensus core: tracks delivery
/// indications of every node and exposes wasDelivered()/recycle().
class RecyclableObject {
 public:
  RecyclableObject(NodeId self, std::uint32_t n, std::uint32_t t, std::unique_ptr<AsyncCore> core);

  RecyclableObject(const RecyclableObject& other);
  RecyclableObject& operator=(const RecyclableObject& other);
  RecyclableObject(RecyclableObject&&) noexcept = default;
  RecyclableObject& operator=(RecyclableObject&&) noexcept = default;

  // A second proposal within one incarnation is ignored.
  void propose(Bit v);
  std::optional<Bit> proposed() const { return core_->proposal(); }

  // Reading a decided value or the error symbol marks local delivery.
  ObjectResult result();
  bool was_delivered() const;
  void recycle();

  /// One do-forever iteration: consistency test, merge of arriving delivery flags,
  /// one core step. Returns the payload to broadcast.
  EstPayload pulse_step(std::span<const std::optional<EstPayload>> inbox, const StepContext& ctx);

  // Fresh means indistinguishable from the initial state.
  bool is_fresh() const;

  const std::vector<bool>& delivered() const { return delivered_; }
  const AsyncCore& core() const { return *core_; }
  AsyncCore& core() { return *core_; }

  void corrupt(Corruptor& c);

 private:
  NodeId self_;
  std::uint32_t n_;
  std::uint32_t t_;
  std::unique_ptr<AsyncCore> core_;
  std::vector<bool> delivered_;
};

}  // namespace ssbft
