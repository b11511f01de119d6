#include <doctest.h>

#include <functional>
#include <set>

#include "ssbft/env.hpp"
#include "ssbft/rng.hpp"
#include "ssbft/sig_index.hpp"

using namespace ssbft;

namespace {

// Byzantine field from `sender` to `receiver` at `phase`, given what the correct nodes
// send in that phase.
using ByzSig = std::function<std::optional<SigField>(Phase phase, NodeId sender, NodeId receiver,
                                                     const std::vector<std::optional<SigField>>&)>;

struct Cluster {
  std::uint32_t n, t, kappa;
  std::uint64_t bound;
  std::vector<bool> byz;
  std::vector<SigIndex> nodes;

  Cluster(std::uint32_t n_, std::uint32_t t_, std::uint64_t bound_, std::vector<bool> byz_,
          std::uint32_t kappa_ = 5)
      : n(n_), t(t_), kappa(kappa_), bound(bound_), byz(std::move(byz_)) {
    for (NodeId i = 0; i < n; ++i) nodes.emplace_back(i, n, t, kappa, bound);
  }

  // Runs phases 0..kappa-1 once. `observe` sees the nodes after every phase.
  void cycle(const std::vector<MaybeValue>& mvc, Bit coin, const ByzSig& adv,
             const std::function<void(Phase)>& observe = {}) {
    std::vector<std::optional<SigField>> sent(n);
    for (Phase ph = 0; ph < kappa; ++ph) {
      std::vector<std::optional<SigField>> next(n);
      for (NodeId i = 0; i < n; ++i) {
        if (byz[i]) continue;
        auto inbox = sent;
        for (NodeId b = 0; b < n; ++b) {
          if (byz[b] && ph > 0) inbox[b] = adv(ph - 1, b, i, sent);
        }
        next[i] = nodes[i].pulse(ph, inbox, mvc[i], coin);
      }
      if (observe) observe(ph);
      sent = next;
    }
  }

  std::vector<std::uint64_t> indices() const {
    std::vector<std::uint64_t> out;
    for (NodeId i = 0; i < n; ++i) {
      if (!byz[i]) out.push_back(nodes[i].get_index());
    }
    return out;
  }
};

ByzSig silent() {
  return [](Phase, NodeId, NodeId,
            const std::vector<std::optional<SigField>>&) -> std::optional<SigField> {
    return std::nullopt;
  };
}

ByzSig random_sig(Rng& rng, std::uint32_t kappa, std::uint64_t bound) {
  return
      [&rng, kappa, bound](Phase ph, NodeId, NodeId,
                           const std::vector<std::optional<SigField>>&) -> std::optional<SigField> {
        if (ph == kappa - 4) return IndexMsg{rng.uniform(0, bound - 1)};
        if (ph == kappa - 3) {
          MaybeValue v;
          if (rng.uniform(0, 3) != 0) v = rng.uniform(0, bound - 1);
          return ProposeMsg{v};
        }
        if (ph == kappa - 2) return BitMsg{rng.bit()};
        return std::nullopt;
      };
}

// Sends values copied from correct senders, split by receiver parity.
ByzSig equivocate_sig(std::uint32_t kappa) {
  return [kappa](Phase ph, NodeId, NodeId receiver,
                 const std::vector<std::optional<SigField>>& correct) -> std::optional<SigField> {
    std::vector<SigField> seen;
    for (auto& f : correct) {
      if (f) seen.push_back(*f);
    }
    if (seen.empty()) return std::nullopt;
    if (ph == kappa - 2) return BitMsg{static_cast<Bit>(receiver % 2)};
    return receiver % 2 ? seen.front() : seen.back();
  };
}

bool all_equal(const std::vector<std::uint64_t>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

std::vector<bool> byz_mask(std::uint32_t n, std::uint32_t t, std::uint64_t seed) {
  std::vector<bool> byz(n, false);
  Rng rng(seed);
  std::uint32_t placed = 0;
  while (placed < t) {
    auto k = rng.uniform(0, n - 1);
    if (!byz[k]) {
      byz[k] = true;
      ++placed;
    }
  }
  return byz;
}

}  // namespace

TEST_CASE("sig index requires five phases and a positive bound") {
  CHECK_THROWS_AS(SigIndex(0, 4, 1, 4, 8), ParamError);
  CHECK_THROWS_AS(SigIndex(0, 4, 1, 5, 0), ParamError);
}

TEST_CASE("agreed index steps by the increment") {
  for (Bit inc = 0; inc < 2; ++inc) {
    for (Bit coin = 0; coin < 2; ++coin) {
      Cluster c(4, 1, 8, {false, false, false, true});
      for (auto& s : c.nodes) s.set_index(3);
      c.cycle(std::vector<MaybeValue>(4, Value{inc}), coin, silent());
      for (auto v : c.indices()) CHECK(v == 3U + inc);
    }
  }
  Cluster wrap(4, 1, 8, {false, false, false, false});
  for (auto& s : wrap.nodes) s.set_index(7);
  wrap.cycle(std::vector<MaybeValue>(4, Value{1}), 0, silent());
  for (auto v : wrap.indices()) CHECK(v == 0);
}

TEST_CASE("only mvc output 1 increments") {
  Cluster c(4, 1, 8, {false, false, false, false});
  for (auto& s : c.nodes) s.set_index(2);
  c.cycle({std::nullopt, Value{5}, Value{0}, std::nullopt}, 1, silent());
  for (auto v : c.indices()) CHECK(v == 2);
}

TEST_CASE("raw reads and normalization on write") {
  SigIndex s(0, 4, 1, 5, 8);
  s.set_index(7);
  CHECK(s.get_index() == 7);

  Cluster c(4, 1, 8, {false, false, false, false});
  for (auto& n : c.nodes) n.set_index(12);
  CHECK(c.nodes[0].get_index() == 12);
  c.cycle(std::vector<MaybeValue>(4, Value{0}), 0, silent());
  for (auto v : c.indices()) CHECK(v == 4);
}

TEST_CASE("disagreeing indices without a quorum fall back to zero") {
  Cluster c(4, 1, 8, {false, false, false, false});
  for (NodeId i = 0; i < 4; ++i) c.nodes[i].set_index(i);
  c.cycle(std::vector<MaybeValue>(4, Value{1}), 1, silent());
  for (auto v : c.indices()) CHECK(v == 0);
  for (auto& s : c.nodes) {
    CHECK(!s.propose_value());
    CHECK(s.bit() == 0);
  }
}

TEST_CASE("split bits follow the coin") {
  // n=4, t=1: one correct bit 1, two correct bit 0 plus a Byzantine split.
  for (Bit coin = 0; coin < 2; ++coin) {
    Cluster c(4, 1, 8, {false, false, false, true});
    c.nodes[0].set_index(5);
    c.nodes[1].set_index(5);
    c.nodes[2].set_index(1);
    ByzSig adv = [](Phase ph, NodeId, NodeId r,
                    const std::vector<std::optional<SigField>>&) -> std::optional<SigField> {
      if (ph == 1) return IndexMsg{r == 2 ? 1U : 5U};
      if (ph == 2) return ProposeMsg{r == 2 ? MaybeValue{} : MaybeValue{5}};
      if (ph == 3) return BitMsg{static_cast<Bit>(r == 2 ? 0 : 1)};
      return std::nullopt;
    };
    c.cycle(std::vector<MaybeValue>(4, Value{1}), coin, adv);
    // Nodes 0 and 1 see <5> three times and bits 1,1,1 from 0, 1 and the Byzantine node.
    CHECK(c.nodes[0].get_index() == 6);
    CHECK(c.nodes[1].get_index() == 6);
    // Node 2 saw <5> twice: save 0, bits 1,1,0,0, so coin * (0 + 1).
    CHECK(c.nodes[2].get_index() == coin);
  }
}

TEST_CASE("two quorums of n-t cannot carry different values") {
  // Correct senders send one value each; Byzantine senders may send anything to anyone.
  for (std::uint32_t n = 1; n <= 6; ++n) {
    for (std::uint32_t t = 0; 3 * t < n; ++t) {
      const std::uint32_t h = n - t;
      std::uint32_t combos = 1;
      for (std::uint32_t k = 0; k < h; ++k) combos *= 3;
      std::uint32_t byz_combos = 1;
      for (std::uint32_t k = 0; k < t; ++k) byz_combos *= 4;
      for (std::uint32_t code = 0; code < combos; ++code) {
        std::vector<std::optional<SigField>> inbox(n);
        std::uint32_t x = code;
        for (NodeId i = 0; i < h; ++i) {
          inbox[i] = IndexMsg{x % 3};
          x /= 3;
        }
        std::set<Value> reachable;
        for (std::uint32_t bcode = 0; bcode < byz_combos; ++bcode) {
          std::uint32_t y = bcode;
          for (NodeId b = h; b < n; ++b) {
            auto v = y % 4;
            y /= 4;
            inbox[b] = v == 3 ? std::nullopt : std::optional<SigField>(IndexMsg{v});
          }
          SigIndex s(0, n, t, 5, 8);
          s.pulse(2, inbox, std::nullopt, 0);
          if (s.propose_value()) reachable.insert(*s.propose_value());
        }
        CHECK(reachable.size() <= 1);
      }
    }
  }
}

TEST_CASE("a bit of 1 at one correct node fixes the save of all (n > 4t)") {
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const bool big = seed % 2 == 0;
    const std::uint32_t n = big ? 9 : 5;
    const std::uint32_t t = big ? 2 : 1;
    Rng rng(seed);
    Cluster c(n, t, 4, byz_mask(n, t, seed));
    for (auto& s : c.nodes) s.set_index(rng.uniform(0, 1));
    ByzSig adv = seed % 4 < 2 ? random_sig(rng, 5, 4) : equivocate_sig(5);
    bool checked = false;
    c.cycle(std::vector<MaybeValue>(n, Value{0}), rng.bit(), adv, [&](Phase ph) {
      if (ph != 3) return;
      std::set<std::uint64_t> saves;
      bool any_bit = false;
      for (NodeId i = 0; i < n; ++i) {
        if (c.byz[i]) continue;
        saves.insert(c.nodes[i].save());
        any_bit |= c.nodes[i].bit() == 1;
      }
      if (any_bit) CHECK(saves.size() == 1);
      checked = true;
    });
    CHECK(checked);
  }
}

TEST_CASE("with n = 3t+1 a bit of 1 does not fix every save") {
  Cluster c(4, 1, 8, {false, false, false, true});
  c.nodes[0].set_index(5);
  c.nodes[1].set_index(5);
  c.nodes[2].set_index(2);
  ByzSig adv = [](Phase ph, NodeId, NodeId r,
                  const std::vector<std::optional<SigField>>&) -> std::optional<SigField> {
    if (ph == 1) return IndexMsg{r == 2 ? 2U : 5U};
    if (ph == 2) return ProposeMsg{r == 2 ? MaybeValue{} : MaybeValue{5}};
    if (ph == 3) return BitMsg{static_cast<Bit>(r == 2 ? 0 : 1)};
    return std::nullopt;
  };
  bool split = false;
  c.cycle(std::vector<MaybeValue>(4, Value{0}), 0, adv, [&](Phase ph) {
    if (ph != 3) return;
    split = c.nodes[0].bit() == 1 && c.nodes[0].save() == 5 && c.nodes[2].save() == 0 &&
            c.nodes[2].bit() == 0;
  });
  CHECK(split);
  CHECK(c.nodes[0].get_index() == 5);
  CHECK(c.nodes[2].get_index() == 0);
}

TEST_CASE("agreed indices stay closed under the increment for 50 cycles") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed + 1000);
    const std::uint32_t n = seed % 2 ? 7 : 4;
    const std::uint32_t t = (n - 1) / 3;
    const std::uint64_t bound = 6 + seed % 5;
    Cluster c(n, t, bound, byz_mask(n, t, seed));
    std::uint64_t v = rng.uniform(0, bound - 1);
    for (auto& s : c.nodes) s.set_index(v);
    ByzSig adv = seed % 3 == 0 ? equivocate_sig(5) : random_sig(rng, 5, bound);
    for (int cycle = 0; cycle < 50; ++cycle) {
      const Bit inc = rng.bit();
      c.cycle(std::vector<MaybeValue>(n, Value{inc}), rng.bit(), adv);
      v = (v + inc) % bound;
      for (auto x : c.indices()) CHECK(x == v);
    }
  }
}

TEST_CASE("disagreeing starts converge in at least 45% of cycles") {
  std::uint32_t unequal = 0;
  std::uint32_t converged = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    Rng rng(seed + 5000);
    Cluster c(4, 1, 8, byz_mask(4, 1, seed));
    for (auto& s : c.nodes) s.set_index(rng.uniform(0, 7));
    if (all_equal(c.indices())) continue;
    ++unequal;
    c.cycle(std::vector<MaybeValue>(4, Value{rng.bit()}), rcc_draw(seed, 3), random_sig(rng, 5, 8));
    converged += all_equal(c.indices());
  }
  REQUIRE(unequal > 100);
  CHECK(converged >= 0.45 * unequal);
}

TEST_CASE("preview matches the field sent, without side effects") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    SigIndex s(0, 4, 1, 5, 8);
    Corruptor cor(trial);
    s.corrupt(cor);
    std::vector<std::optional<SigField>> inbox(4);
    const Phase ph = static_cast<Phase>(rng.uniform(0, 4));
    for (auto& f : inbox) {
      switch (rng.uniform(0, 3)) {
        case 0:
          f = IndexMsg{rng.uniform(0, 3)};
          break;
        case 1:
          f = ProposeMsg{rng.uniform(0, 3)};
          break;
        case 2:
          f = BitMsg{rng.bit()};
          break;
        default:
          break;
      }
    }
    const auto before = s.get_index();
    auto p = s.preview(ph, inbox);
    CHECK(s.get_index() == before);
    SigIndex copy = s;
    CHECK(copy.pulse(ph, inbox, Value{1}, 1) == p);
  }
}

TEST_CASE("fields of the wrong kind are ignored") {
  SigIndex s(0, 4, 1, 5, 8);
  std::vector<std::optional<SigField>> inbox{BitMsg{1}, BitMsg{1}, ProposeMsg{3}, BitMsg{0}};
  s.pulse(2, inbox, std::nullopt, 0);  // expects IndexMsg
  CHECK(!s.propose_value());
  s.pulse(3, inbox, std::nullopt, 0);  // expects ProposeMsg
  CHECK(s.save() == 0);
  CHECK(s.bit() == 0);
}
