#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>

#include "ssbft/eig.hpp"

using namespace ssbft;

namespace {

// What Byzantine `sender` reports to `receiver` about `label` at `level`.
using ByzFn = std::function<MaybeValue(std::uint32_t level, NodeId sender, NodeId receiver,
                                       const Label& label)>;

bool contains(const Label& l, NodeId k) { return std::find(l.begin(), l.end(), k) != l.end(); }

std::vector<MaybeValue> run_eig(std::uint32_t n, std::uint32_t t, const std::vector<Value>& props,
                                const std::vector<bool>& byz, const ByzFn& adv) {
  std::vector<EigConsensus> nodes;
  for (NodeId i = 0; i < n; ++i) nodes.emplace_back(i, n, t);
  std::vector<std::optional<CoField>> sent(n);
  for (NodeId i = 0; i < n; ++i) {
    nodes[i].restart();
    if (!byz[i]) sent[i] = nodes[i].propose(props[i]);
  }
  for (std::uint32_t level = 1; level <= t + 1; ++level) {
    std::vector<std::optional<CoField>> next(n);
    for (NodeId r = 0; r < n; ++r) {
      if (byz[r]) continue;
      std::vector<std::optional<CoField>> inbox(n);
      for (NodeId s = 0; s < n; ++s) {
        if (!byz[s]) {
          inbox[s] = sent[s];
          continue;
        }
        CoField f{level, {}};
        for (auto& label : eig_labels(n, level - 1)) {
          if (!contains(label, s)) f.entries.push_back({label, adv(level, s, r, label)});
        }
        inbox[s] = f;
      }
      next[r] = nodes[r].process(inbox);
    }
    sent = next;
  }
  std::vector<MaybeValue> out(n);
  for (NodeId i = 0; i < n; ++i) {
    if (!byz[i]) out[i] = nodes[i].result();
  }
  return out;
}

// Independent evaluation: tree values defined recursively from the senders, then
// resolved bottom-up by strict majority with default 0.
struct Oracle {
  std::uint32_t n, t;
  const std::vector<Value>& props;
  const std::vector<bool>& byz;
  const ByzFn& adv;

  // Value correct node i holds for `label` (label does not contain i unless empty).
  MaybeValue stored(NodeId i, const Label& label) const {
    if (label.empty()) return props[i];
    Label parent(label.begin(), label.end() - 1);
    NodeId s = label.back();
    if (byz[s]) return adv(static_cast<std::uint32_t>(label.size()), s, i, parent);
    return stored(s, parent);
  }

  MaybeValue resolve(NodeId i, Label& label) const {
    if (label.size() == t + 1) return stored(i, label);
    std::map<Value, std::uint32_t> votes;
    std::uint32_t kids = 0;
    for (NodeId k = 0; k < n; ++k) {
      if (contains(label, k)) continue;
      ++kids;
      label.push_back(k);
      auto v = resolve(i, label);
      label.pop_back();
      if (v) ++votes[*v];
    }
    for (auto& [v, c] : votes) {
      if (2 * c > kids) return v;
    }
    return Value{0};
  }
};

ByzFn silent_byz() {
  return [](std::uint32_t, NodeId, NodeId, const Label&) -> MaybeValue { return std::nullopt; };
}

}  // namespace

TEST_CASE("eig labels") {
  CHECK(eig_labels(4, 0) == std::vector<Label>{Label{}});
  CHECK(eig_labels(3, 1) == std::vector<Label>{{0}, {1}, {2}});
  auto two = eig_labels(4, 2);
  CHECK(two.size() == 12);
  CHECK(std::is_sorted(two.begin(), two.end()));
  CHECK(eig_labels(5, 3).size() == 60);
  CHECK(eig_labels(2, 3).empty());
}

TEST_CASE("eig with unanimous proposals") {
  const std::vector<bool> none(4, false);
  for (Value v : {0ULL, 1ULL, 6ULL}) {
    auto out = run_eig(4, 1, std::vector<Value>(4, v), none, silent_byz());
    for (auto& r : out) CHECK(r == v);
  }
  const std::vector<bool> one{false, false, false, true};
  auto out = run_eig(4, 1, {1, 1, 1, 0}, one, silent_byz());
  for (NodeId i = 0; i < 3; ++i) CHECK(out[i] == Value{1});
}

TEST_CASE("eig with t = 0 is a majority vote with default 0") {
  const std::vector<bool> none(4, false);
  auto split = run_eig(4, 0, {1, 0, 1, 0}, none, silent_byz());
  for (auto& r : split) CHECK(r == Value{0});
  auto three = run_eig(4, 0, {1, 1, 1, 0}, none, silent_byz());
  for (auto& r : three) CHECK(r == Value{1});
}

TEST_CASE("eig result is bottom until the last level") {
  EigConsensus e(0, 4, 1);
  std::vector<std::optional<CoField>> none(4);
  CHECK(!e.process(none));  // not proposed
  e.propose(1);
  CHECK(!e.result());
  auto relay = e.process(none);
  REQUIRE(relay);
  CHECK(relay->level == 2);
  CHECK(relay->entries.size() == 3);  // labels {1},{2},{3}
  CHECK(!e.result());
  CHECK(!e.process(none));
  CHECK(e.levels() == 2);
  CHECK(e.result() == Value{0});  // every child ⊥
  CHECK(!e.process(none));
}

TEST_CASE("malformed entries count as bottom") {
  EigConsensus e(0, 4, 1);
  e.propose(1);
  std::vector<std::optional<CoField>> inbox(4);
  inbox[0] = CoField{1, {CoEntry{{}, 1}}};                  // own echo
  inbox[1] = CoField{1, {CoEntry{{}, 1}, CoEntry{{}, 1}}};  // duplicate
  inbox[2] = CoField{2, {CoEntry{{}, 1}}};                  // wrong level
  inbox[3] = CoField{1, {CoEntry{{0}, 1}}};                 // wrong label
  e.process(inbox);
  CHECK(e.tree().at(Label{0}) == Value{1});
  CHECK(!e.tree().at(Label{1}));
  CHECK(!e.tree().at(Label{2}));
  CHECK(!e.tree().at(Label{3}));
}

TEST_CASE("eig matches the independent evaluation under random Byzantine values") {
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const bool big = trial % 3 == 0;
    const std::uint32_t n = big ? 7 : 4;
    const std::uint32_t t = big ? 2 : 1;
    std::vector<bool> byz(n, false);
    for (std::uint32_t k = 0; k < t; ++k) byz[rng.uniform(0, n - 1)] = true;
    std::vector<Value> props(n);
    for (auto& p : props) p = rng.uniform(0, 2);
    std::map<std::tuple<std::uint32_t, NodeId, NodeId, Label>, MaybeValue> script;
    ByzFn adv = [&](std::uint32_t level, NodeId s, NodeId r, const Label& l) -> MaybeValue {
      auto key = std::make_tuple(level, s, r, l);
      auto it = script.find(key);
      if (it != script.end()) return it->second;
      MaybeValue v;
      if (rng.uniform(0, 3) != 0) v = rng.uniform(0, 2);
      script[key] = v;
      return v;
    };
    auto out = run_eig(n, t, props, byz, adv);
    Oracle oracle{n, t, props, byz, adv};
    std::optional<Value> first;
    for (NodeId i = 0; i < n; ++i) {
      if (byz[i]) continue;
      Label root;
      CHECK(out[i] == oracle.resolve(i, root));
      REQUIRE(out[i]);
      if (!first) first = *out[i];
      CHECK(*out[i] == *first);
    }
    bool unanimous = true;
    for (NodeId i = 0; i < n; ++i) {
      if (!byz[i] && props[i] != props[std::find(byz.begin(), byz.end(), false) - byz.begin()]) {
        unanimous = false;
      }
    }
    if (unanimous) CHECK(*first == props[std::find(byz.begin(), byz.end(), false) - byz.begin()]);
  }
}

TEST_CASE("forced and corrupted states") {
  EigConsensus e(1, 4, 1);
  e.force_decided(1);
  CHECK(e.result() == Value{1});
  e.restart();
  CHECK(!e.result());
  CHECK(!e.proposed());
  CHECK(e.tree().empty());

  Corruptor c(2);
  for (int k = 0; k < 50; ++k) {
    e.corrupt(c);
    CHECK(e.levels() <= 3);
    e.restart();
    e.propose(0);
    CHECK(e.tree().size() == 1);
  }
}
