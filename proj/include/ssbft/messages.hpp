#pragma once

// Wire schemas of the per-round meta-message. Every sub-protocol owns one optional
// field; the transport never inspects field contents.

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "ssbft/types.hpp"

namespace ssbft {

// Payload of a pluggable asynchronous binary-consensus core. The meaning of `stage`
// and `mask` is core specific; `mask` bit v set means value v is carried.
struct CoreMessage {
  std::uint32_t round = 0;
  std::uint8_t stage = 0;
  std::uint8_t mask = 0;

  bool operator==(const CoreMessage&) const = default;
};

// Recyclable-object traffic: core payload plus the sender's local delivery flag.
struct EstPayload {
  CoreMessage core;
  bool delivered = false;

  bool operator==(const EstPayload&) const = default;
};

struct EstEntry {
  std::uint32_t slot = 0;
  EstPayload payload;

  bool operator==(const EstEntry&) const = default;
};

// One entry per live slot of the sender's object array.
struct EstField {
  std::vector<EstEntry> entries;

  bool operator==(const EstField&) const = default;
};

// Information-gathering tree label: a sequence of distinct node ids.
using Label = std::vector<NodeId>;

struct CoEntry {
  Label label;
  MaybeValue value;

  bool operator==(const CoEntry&) const = default;
};

// One round of the synchronous consensus core: `level` is the exchange round (1-based),
// entries relay the sender's tree values at depth level-1.
struct CoField {
  std::uint32_t level = 0;
  std::vector<CoEntry> entries;

  bool operator==(const CoField&) const = default;
};

struct IndexMsg {
  std::uint64_t value = 0;
  bool operator==(const IndexMsg&) const = default;
};
struct ProposeMsg {
  MaybeValue value;
  bool operator==(const ProposeMsg&) const = default;
};
struct BitMsg {
  Bit value = 0;
  bool operator==(const BitMsg&) const = default;
};

using SigField = std::variant<IndexMsg, ProposeMsg, BitMsg>;

struct Payload {
  std::optional<EstField> est;
  std::optional<CoField> co;
  std::optional<SigField> sig;

  bool empty() const { return !est && !co && !sig; }
  bool operator==(const Payload&) const = default;
};

}  // namespace ssbft
