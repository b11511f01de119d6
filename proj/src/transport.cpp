#include "ssbft/transport.hpp"

#include <stdexcept>

namespace ssbft {

namespace {

enum FieldTag : std::uint8_t {
  kSenderTag = 0x53,  // 'S'
  kEstTag = 0x01,
  kCoTag = 0x02,
  kSigTag = 0x03,
};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void maybe(const MaybeValue& v) {
    u8(v ? 1 : 0);
    if (v) u64(*v);
  }
  void field(std::uint8_t tag, const std::vector<std::uint8_t>& body) {
    u8(tag);
    u32(static_cast<std::uint32_t>(body.size()));
    out_.insert(out_.end(), body.begin(), body.end());
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

std::vector<std::uint8_t> encode(const EstField& est) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(est.entries.size()));
  for (const auto& e : est.entries) {
    w.u32(e.slot);
    w.u32(e.payload.core.round);
    w.u8(e.payload.core.stage);
    w.u8(e.payload.core.mask);
    w.u8(e.payload.delivered ? 1 : 0);
  }
  return w.take();
}

std::vector<std::uint8_t> encode(const CoField& co) {
  Writer w;
  w.u32(co.level);
  w.u32(static_cast<std::uint32_t>(co.entries.size()));
  for (const auto& e : co.entries) {
    w.u32(static_cast<std::uint32_t>(e.label.size()));
    for (NodeId id : e.label) w.u32(id);
    w.maybe(e.value);
  }
  return w.take();
}

std::vector<std::uint8_t> encode(const SigField& sig) {
  Writer w;
  w.u8(static_cast<std::uint8_t>(sig.index()));
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, IndexMsg>) {
          w.u64(m.value);
        } else if constexpr (std::is_same_v<M, ProposeMsg>) {
          w.maybe(m.value);
        } else {
          w.u8(m.value);
        }
      },
      sig);
  return w.take();
}

void append_payload(Writer& w, const Payload& p) {
  if (p.est) w.field(kEstTag, encode(*p.est));
  if (p.co) w.field(kCoTag, encode(*p.co));
  if (p.sig) w.field(kSigTag, encode(*p.sig));
}

}  // namespace

std::vector<RoundMail> Network::exchange(Round round,
                                         const std::vector<std::optional<Outbox>>& outboxes,
                                         const std::vector<bool>& correct) const {
  if (outboxes.size() != n_ || correct.size() != n_) {
    throw std::logic_error("exchange: expected one outbox slot per node");
  }
  for (NodeId i = 0; i < n_; ++i) {
    if (outboxes[i] && outboxes[i]->size() != n_) {
      throw std::logic_error("exchange: outbox of node " + std::to_string(i) +
                             " has wrong destination count");
    }
    if (correct[i] && !outboxes[i]) {
      throw std::logic_error("exchange: missing outbox for correct node " + std::to_string(i) +
                             " in round " + std::to_string(round));
    }
  }

  std::vector<RoundMail> mail(n_);
  for (NodeId j = 0; j < n_; ++j) {
    mail[j].inbox.reserve(n_);
    for (NodeId i = 0; i < n_; ++i) {
      mail[j].inbox.push_back(Envelope(i, outboxes[i] ? (*outboxes[i])[j] : Payload{}));
    }
    mail[j].complete = true;
  }
  return mail;
}

std::vector<RoundMail> Network::initial_mail(const std::vector<Outbox>& in_flight) const {
  std::vector<std::optional<Outbox>> boxes(in_flight.begin(), in_flight.end());
  boxes.resize(n_);
  return exchange(0, boxes, std::vector<bool>(n_, false));
}

std::vector<RoundMail> Network::silent_mail() const {
  return exchange(0, std::vector<std::optional<Outbox>>(n_), std::vector<bool>(n_, false));
}

Payload multiplex(std::optional<EstField> est, std::optional<CoField> co,
                  std::optional<SigField> sig) {
  return Payload{std::move(est), std::move(co), std::move(sig)};
}

std::tuple<std::optional<EstField>, std::optional<CoField>, std::optional<SigField>> demultiplex(
    const Payload& payload) {
  return {payload.est, payload.co, payload.sig};
}

std::tuple<std::optional<EstField>, std::optional<CoField>, std::optional<SigField>> demultiplex(
    const Envelope& envelope) {
  return demultiplex(envelope.payload());
}

std::vector<std::uint8_t> serialize(const Payload& payload) {
  Writer w;
  append_payload(w, payload);
  return w.take();
}

std::vector<std::uint8_t> serialize(const Envelope& envelope) {
  Writer w;
  w.u8(kSenderTag);
  w.u32(envelope.sender());
  append_payload(w, envelope.payload());
  return w.take();
}

std::string to_hex(const std::vector<std::uint8_t>& bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ssbft
