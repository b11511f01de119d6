#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "ssbft/messages.hpp"
#include "ssbft/types.hpp"

namespace ssbft {

/// A delivered message. Only the network can build one, so the sender id always names
/// the node whose outbox produced the payload.
class Envelope {
 public:
  NodeId sender() const { return sender_; }
  const Payload& payload() const { return payload_; }

  bool operator==(const Envelope&) const = default;

 private:
  friend class Network;
  Envelope(NodeId sender, Payload payload) : sender_(sender), payload_(std::move(payload)) {}

  NodeId sender_;
  Payload payload_;
};

/// Everything a node receives at the start of a round, indexed by sender.
struct RoundMail {
  std::vector<Envelope> inbox;
  bool complete = false;

  const Envelope& from(NodeId sender) const { return inbox.at(sender); }
};

// One payload per destination node.
using Outbox = std::vector<Payload>;

/// Lock-step reliable channels between all pairs (self included).
class Network {
 public:
  explicit Network(std::uint32_t n) : n_(n) {}

  std::uint32_t size() const { return n_; }

  /// Delivers round-`round` outboxes: result[j].inbox[i] carries outboxes[i][j].
  /// A node flagged correct must supply an outbox of exactly n payloads; a missing
  /// Byzantine outbox is delivered as empty payloads.
  std::vector<RoundMail> exchange(Round round, const std::vector<std::optional<Outbox>>& outboxes,
                                  const std::vector<bool>& correct) const;

  /// Mail that is already in flight when execution starts. Channel contents are part
  /// of the arbitrary initial state, but they are still attributed to a real sender.
  std::vector<RoundMail> initial_mail(const std::vector<Outbox>& in_flight) const;

  /// Empty mail for every node.
  std::vector<RoundMail> silent_mail() const;

 private:
  std::uint32_t n_;
};

Payload multiplex(std::optional<EstField> est, std::optional<CoField> co,
                  std::optional<SigField> sig);

std::tuple<std::optional<EstField>, std::optional<CoField>, std::optional<SigField>> demultiplex(
    const Payload& payload);
std::tuple<std::optional<EstField>, std::optional<CoField>, std::optional<SigField>> demultiplex(
    const Envelope& envelope);

// Canonical byte form used for trace logging only: field tag byte, little-endian u32
// length, field bytes. Integers are little-endian.
std::vector<std::uint8_t> serialize(const Payload& payload);
std::vector<std::uint8_t> serialize(const Envelope& envelope);
std::string to_hex(const std::vector<std::uint8_t>& bytes);

// FNV-1a over a byte string; folded into per-round trace digests.
std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes,
                    std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace ssbft
