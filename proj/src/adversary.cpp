#include "ssbft/adversary.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ssbft {

namespace {

std::optional<std::uint32_t> co_level(const Params& p, Phase phase) {
  if (phase <= p.t) return phase + 1;
  return std::nullopt;
}

std::vector<Label> relay_labels(const Params& p, std::uint32_t level, NodeId sender) {
  std::vector<Label> out;
  for (auto& label : eig_labels(p.n, level - 1)) {
    if (std::find(label.begin(), label.end(), sender) == label.end()) out.push_back(label);
  }
  return out;
}

// Slots with EST traffic from correct senders in the mail of `node`.
std::vector<std::uint32_t> observed_slots(const std::vector<RoundMail>& mail, NodeId node,
                                          const std::vector<bool>& byz) {
  std::set<std::uint32_t> slots;
  if (node < mail.size()) {
    for (const auto& env : mail[node].inbox) {
      if (byz[env.sender()] || !env.payload().est) continue;
      for (const auto& e : env.payload().est->entries) slots.insert(e.slot);
    }
  }
  return {slots.begin(), slots.end()};
}

// Core message of some correct sender for `slot`, used as a template for forgeries.
CoreMessage template_core(const std::vector<RoundMail>& mail, NodeId node,
                          const std::vector<bool>& byz, std::uint32_t slot) {
  if (node < mail.size()) {
    for (const auto& env : mail[node].inbox) {
      if (byz[env.sender()] || !env.payload().est) continue;
      for (const auto& e : env.payload().est->entries) {
        if (e.slot == slot) return e.payload.core;
      }
    }
  }
  return {};
}

}  // namespace

Policy parse_policy(const std::string& name) {
  if (name == "silent") return Policy::kSilent;
  if (name == "random") return Policy::kRandom;
  if (name == "equivocate") return Policy::kEquivocate;
  if (name == "worst-sig") return Policy::kWorstSig;
  if (name == "worst-eig") return Policy::kWorstEig;
  throw ParamError("unknown adversary policy: " + name);
}

std::string to_string(Policy p) {
  switch (p) {
    case Policy::kSilent: return "silent";
    case Policy::kRandom: return "random";
    case Policy::kEquivocate: return "equivocate";
    case Policy::kWorstSig: return "worst-sig";
    case Policy::kWorstEig: return "worst-eig";
  }
  return "?";
}

InjectMode parse_inject(const std::string& name) {
  if (name == "none") return InjectMode::kNone;
  if (name == "full") return InjectMode::kFull;
  if (name == "targeted") return InjectMode::kTargeted;
  throw ParamError("unknown injection mode: " + name);
}

std::string to_string(InjectMode m) {
  switch (m) {
    case InjectMode::kNone: return "none";
    case InjectMode::kFull: return "full";
    case InjectMode::kTargeted: return "targeted";
  }
  return "?";
}

std::vector<bool> choose_byzantine(std::uint32_t n, std::uint32_t t, std::uint64_t seed) {
  if (t > n) throw ParamError("choose_byzantine: t exceeds n");
  std::vector<NodeId> ids(n);
  for (NodeId i = 0; i < n; ++i) ids[i] = i;
  Rng rng(seed);
  // Partial Fisher-Yates; std::shuffle is not portable across standard libraries.
  for (std::uint32_t k = 0; k < t; ++k) {
    auto j = static_cast<std::uint32_t>(rng.uniform(k, n - 1));
    std::swap(ids[k], ids[j]);
  }
  std::vector<bool> byz(n, false);
  for (std::uint32_t k = 0; k < t; ++k) byz[ids[k]] = true;
  return byz;
}

Payload random_payload(Rng& rng, const Params& params, Phase phase, NodeId sender,
                       const std::vector<std::uint32_t>& est_slots) {
  Payload p;
  auto maybe_bit = [&]() -> MaybeValue {
    if (rng.uniform(0, 3) == 0) return std::nullopt;
    return Value{rng.bit()};
  };

  if (!est_slots.empty()) {
    EstField est;
    for (auto slot : est_slots) {
      CoreMessage core{static_cast<std::uint32_t>(rng.uniform(0, 8)),
                       static_cast<std::uint8_t>(rng.uniform(0, 2)),
                       static_cast<std::uint8_t>(rng.uniform(0, 3))};
      est.entries.push_back(EstEntry{slot, EstPayload{core, rng.bit() != 0}});
    }
    p.est = std::move(est);
  }

  if (auto level = co_level(params, phase)) {
    CoField co{*level, {}};
    for (auto& label : relay_labels(params, *level, sender)) {
      co.entries.push_back(CoEntry{label, maybe_bit()});
    }
    p.co = std::move(co);
  }

  const Phase k = params.kappa;
  if (phase == k - 4) {
    p.sig = IndexMsg{rng.uniform(0, params.index_bound - 1)};
  } else if (phase == k - 3) {
    MaybeValue v;
    if (rng.uniform(0, 3) != 0) v = rng.uniform(0, params.index_bound - 1);
    p.sig = ProposeMsg{v};
  } else if (phase == k - 2) {
    p.sig = BitMsg{rng.bit()};
  }
  return p;
}

std::vector<Outbox> random_initial_mail(Rng& rng, const Params& params) {
  std::vector<std::uint32_t> all_slots(params.index_num);
  for (std::uint32_t s = 0; s < params.index_num; ++s) all_slots[s] = s;
  std::vector<Outbox> mail(params.n, Outbox(params.n));
  for (NodeId i = 0; i < params.n; ++i) {
    for (NodeId j = 0; j < params.n; ++j) {
      // Pretend the previous round had an arbitrary phase.
      auto phase = static_cast<Phase>(rng.uniform(0, params.kappa - 1));
      mail[i][j] = random_payload(rng, params, phase, i, all_slots);
    }
  }
  return mail;
}

Adversary::Adversary(Policy policy, const Params& params, std::vector<bool> byzantine,
                     std::uint64_t seed)
    : policy_(policy), params_(params), byz_(std::move(byzantine)), rng_(seed) {
  if (byz_.size() != params.n) throw ParamError("Adversary: byzantine mask has wrong size");
  if (std::count(byz_.begin(), byz_.end(), true) > static_cast<long>(params.t)) {
    throw ParamError("Adversary: more than t Byzantine nodes");
  }
}

std::vector<std::optional<Outbox>> Adversary::outboxes(const AdversaryView& view) {
  std::vector<std::optional<Outbox>> out(params_.n);
  // One fresh pair of conflicting values per round for equivocation.
  const Value a = rng_.uniform(0, params_.index_bound - 1);
  for (NodeId b = 0; b < params_.n; ++b) {
    if (!byz_[b]) continue;
    Outbox box(params_.n);
    for (NodeId r = 0; r < params_.n; ++r) box[r] = payload_for(view, b, r, a);
    out[b] = std::move(box);
  }
  return out;
}

Payload Adversary::payload_for(const AdversaryView& view, NodeId sender, NodeId receiver,
                               Value a) {
  const Params& p = params_;
  const Phase k = p.kappa;
  const Bit half = receiver < p.n / 2 ? 0 : 1;

  switch (policy_) {
    case Policy::kSilent:
      return {};

    case Policy::kRandom:
      return random_payload(rng_, p, view.phase, sender,
                            observed_slots(view.mail, sender, byz_));

    case Policy::kEquivocate: {
      Payload out;
      auto slots = observed_slots(view.mail, sender, byz_);
      if (!slots.empty()) {
        EstField est;
        for (auto s : slots) {
          CoreMessage core = template_core(view.mail, sender, byz_, s);
          core.mask = static_cast<std::uint8_t>(1U << half);
          est.entries.push_back(EstEntry{s, EstPayload{core, half == 1}});
        }
        out.est = std::move(est);
      }
      if (auto level = co_level(p, view.phase)) {
        CoField co{*level, {}};
        for (auto& label : relay_labels(p, *level, sender)) co.entries.push_back({label, half});
        out.co = std::move(co);
      }
      const Value b = (a + 1) % p.index_bound;
      if (view.phase == k - 4) out.sig = IndexMsg{half ? b : a};
      if (view.phase == k - 3) out.sig = ProposeMsg{half ? b : a};
      if (view.phase == k - 2) out.sig = BitMsg{half};
      return out;
    }

    case Policy::kWorstSig: {
      Payload out;
      if (auto level = co_level(p, view.phase)) {
        CoField co{*level, {}};
        for (auto& label : relay_labels(p, *level, sender)) co.entries.push_back({label, half});
        out.co = std::move(co);
      }
      out.sig = worst_sig(view);
      return out;
    }

    case Policy::kWorstEig: {
      Payload out;
      out.co = eig_relay(view, sender, receiver);
      if (view.phase == k - 4) out.sig = IndexMsg{a};
      if (view.phase == k - 2) out.sig = BitMsg{half};
      return out;
    }
  }
  return {};
}

std::optional<CoField> Adversary::eig_relay(const AdversaryView& view, NodeId sender,
                                            NodeId receiver) {
  auto level = co_level(params_, view.phase);
  if (!level) return std::nullopt;
  const bool flip = receiver % 2 == 0;
  CoField co{*level, {}};
  if (*level == 1) {
    co.entries.push_back({Label{}, Value{receiver < params_.n / 2 ? 0U : 1U}});
    return co;
  }
  for (auto& label : relay_labels(params_, *level, sender)) {
    // label = parent . origin: repeat what `origin` told us about `parent`, flipped for
    // even receivers.
    Label parent(label.begin(), label.end() - 1);
    NodeId origin = label.back();
    MaybeValue v;
    if (sender < view.mail.size()) {
      const auto& field = view.mail[sender].from(origin).payload().co;
      if (field) {
        for (const auto& e : field->entries) {
          if (e.label == parent) v = e.value;
        }
      }
    }
    if (v && *v <= 1 && flip) v = 1 - *v;
    co.entries.push_back({label, v});
  }
  return co;
}

std::optional<SigField> Adversary::worst_sig(const AdversaryView& view) {
  const Params& p = params_;
  const Phase k = p.kappa;
  const std::uint32_t quorum = p.quorum();

  if (view.phase == k - 4) {
    std::map<Value, std::uint32_t> counts;
    for (const auto& f : view.correct_sig) {
      if (f) {
        if (auto* m = std::get_if<IndexMsg>(&*f)) ++counts[m->value];
      }
    }
    // Least supported in-range value: boosting it cannot complete a quorum unless
    // nothing else could.
    Value best = 0;
    std::uint32_t best_count = ~0U;
    for (Value v = 0; v < p.index_bound && v < 64; ++v) {
      auto c = counts.count(v) ? counts[v] : 0U;
      if (c < best_count) {
        best = v;
        best_count = c;
      }
    }
    return IndexMsg{best};
  }
  if (view.phase == k - 3) return ProposeMsg{std::nullopt};
  if (view.phase == k - 2) {
    std::uint32_t ones = 0;
    std::uint32_t zeros = 0;
    for (const auto& f : view.correct_sig) {
      if (!f) continue;
      if (auto* m = std::get_if<BitMsg>(&*f)) (m->value ? ones : zeros) += 1;
    }
    if (ones < quorum && ones + p.t >= quorum) return BitMsg{0};
    if (zeros < quorum && zeros + p.t >= quorum) return BitMsg{1};
    return BitMsg{rng_.bit()};
  }
  return std::nullopt;
}

void inject_full(SsbftMvc& mvc, SigIndex& sig, ObjectArray& objs, Corruptor& c) {
  mvc.corrupt(c);
  sig.corrupt(c);
  for (std::uint32_t s = 0; s < objs.size(); ++s) objs.at(s).corrupt(c);
}

void inject_targeted(SsbftMvc& mvc, SigIndex& sig, ObjectArray& objs, std::uint64_t index) {
  sig.set_index(index);
  mvc.set_result(Value{1});
  mvc.co().force_decided(1);
  for (std::uint32_t s = 0; s < objs.size(); ++s) objs.at(s).recycle();
}

}  // namespace ssbft
