#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ssbft/env.hpp"
#include "ssbft/mvc.hpp"
#include "ssbft/recycler.hpp"
#include "ssbft/rng.hpp"
#include "ssbft/sig_index.hpp"
#include "ssbft/transport.hpp"

namespace ssbft {

enum class Policy { kSilent, kRandom, kEquivocate, kWorstSig, kWorstEig };
enum class InjectMode { kNone, kFull, kTargeted };

Policy parse_policy(const std::string& name);
std::string to_string(Policy p);
InjectMode parse_inject(const std::string& name);
std::string to_string(InjectMode m);

// Exactly t distinct ids, drawn from the seed. true marks a Byzantine node.
std::vector<bool> choose_byzantine(std::uint32_t n, std::uint32_t t, std::uint64_t seed);

/// What the adversary may look at when fixing round-`round` outboxes. The coin of this
/// round has not been drawn yet.
struct AdversaryView {
  const Params& params;
  Round round = 0;
  Phase phase = 0;
  // Mail delivered to every node at the start of this round.
  const std::vector<RoundMail>& mail;
  // SIG fields the correct nodes are about to send this round (coin independent);
  // nullopt for Byzantine nodes and silent phases.
  const std::vector<std::optional<SigField>>& correct_sig;
};

class Adversary {
 public:
  Adversary(Policy policy, const Params& params, std::vector<bool> byzantine, std::uint64_t seed);

  Policy policy() const { return policy_; }
  const std::vector<bool>& byzantine() const { return byz_; }

  // One entry per node; set only for Byzantine senders.
  std::vector<std::optional<Outbox>> outboxes(const AdversaryView& view);

 private:
  Payload payload_for(const AdversaryView& view, NodeId sender, NodeId receiver, Value a);
  std::optional<CoField> eig_relay(const AdversaryView& view, NodeId sender, NodeId receiver);
  std::optional<SigField> worst_sig(const AdversaryView& view);

  Policy policy_;
  Params params_;
  std::vector<bool> byz_;
  Rng rng_;
};

/// Random but well-formed traffic for `sender` at `phase`: every field that a correct
/// node could send in that phase, with arbitrary values.
Payload random_payload(Rng& rng, const Params& params, Phase phase, NodeId sender,
                       const std::vector<std::uint32_t>& est_slots);

// Channel contents in flight at round 0, one outbox per sender.
std::vector<Outbox> random_initial_mail(Rng& rng, const Params& params);

// Arbitrary values for every mutable protocol variable of one node.
void inject_full(SsbftMvc& mvc, SigIndex& sig, ObjectArray& objs, Corruptor& c);

// Index set to `index`, floating output and co both decided 1, all objects cleared.
void inject_targeted(SsbftMvc& mvc, SigIndex& sig, ObjectArray& objs, std::uint64_t index);

}  // namespace ssbft
