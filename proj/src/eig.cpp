#include "ssbft/eig.hpp"

#include <algorithm>
#include <stdexcept>

namespace ssbft {

namespace {

void extend(std::uint32_t n, std::uint32_t length, Label& prefix, std::vector<Label>& out) {
  if (prefix.size() == length) {
    out.push_back(prefix);
    return;
  }
  for (NodeId k = 0; k < n; ++k) {
    if (std::find(prefix.begin(), prefix.end(), k) != prefix.end()) continue;
    prefix.push_back(k);
    extend(n, length, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Label> eig_labels(std::uint32_t n, std::uint32_t length) {
  std::vector<Label> out;
  Label prefix;
  extend(n, length, prefix, out);
  return out;
}

EigConsensus::EigConsensus(NodeId self, std::uint32_t n, std::uint32_t t)
    : self_(self), n_(n), t_(t) {
  if (self >= n) throw std::invalid_argument("EigConsensus: node id out of range");
  if (t + 1 > n) throw std::invalid_argument("EigConsensus: t+1 exceeds n");
}

void EigConsensus::restart() {
  proposed_ = false;
  levels_ = 0;
  tree_.clear();
}

std::optional<CoField> EigConsensus::propose(Value v) {
  proposed_ = true;
  tree_[Label{}] = v;
  return CoField{1, {CoEntry{Label{}, v}}};
}

std::optional<CoField> EigConsensus::relay() const {
  // Level k+1 carries our values for every stored label of length k that does not
  // contain us.
  const std::uint32_t length = levels_;
  CoField out{levels_ + 1, {}};
  for (const auto& label : eig_labels(n_, length)) {
    if (std::find(label.begin(), label.end(), self_) != label.end()) continue;
    auto it = tree_.find(label);
    out.entries.push_back(CoEntry{label, it == tree_.end() ? std::nullopt : it->second});
  }
  return out;
}

std::optional<CoField> EigConsensus::process(std::span<const std::optional<CoField>> inbox) {
  if (!proposed_ || levels_ > t_) return std::nullopt;

  const std::uint32_t expected = levels_ + 1;
  const auto parents = eig_labels(n_, levels_);
  for (NodeId sender = 0; sender < n_; ++sender) {
    const CoField* field = nullptr;
    if (sender < inbox.size() && inbox[sender] && inbox[sender]->level == expected) {
      field = &*inbox[sender];
    }
    for (const auto& parent : parents) {
      if (std::find(parent.begin(), parent.end(), sender) != parent.end()) continue;
      MaybeValue value;
      if (field) {
        // Exactly one entry for the label, or the slot counts as ⊥.
        std::size_t hits = 0;
        for (const auto& e : field->entries) {
          if (e.label == parent) {
            ++hits;
            value = e.value;
          }
        }
        if (hits != 1) value.reset();
      }
      Label child = parent;
      child.push_back(sender);
      tree_[child] = value;
    }
  }
  ++levels_;
  if (levels_ > t_) return std::nullopt;
  return relay();
}

MaybeValue EigConsensus::resolve(Label& label) const {
  if (label.size() == t_ + 1) {
    auto it = tree_.find(label);
    return it == tree_.end() ? std::nullopt : it->second;
  }
  std::map<Value, std::uint32_t> votes;
  std::uint32_t children = 0;
  for (NodeId k = 0; k < n_; ++k) {
    if (std::find(label.begin(), label.end(), k) != label.end()) continue;
    ++children;
    label.push_back(k);
    MaybeValue v = resolve(label);
    label.pop_back();
    if (v) ++votes[*v];
  }
  for (const auto& [v, count] : votes) {
    if (2 * count > children) return v;
  }
  return Value{0};
}

MaybeValue EigConsensus::result() const {
  if (!proposed_ || levels_ <= t_) return std::nullopt;
  Label root;
  return resolve(root);
}

void EigConsensus::corrupt(Corruptor& c) {
  proposed_ = c.any_bool("eig.proposed");
  levels_ = static_cast<std::uint32_t>(c.any_below("eig.levels", t_ + 3));
  tree_.clear();
  for (std::uint32_t len = 0; len <= t_ + 1; ++len) {
    for (const auto& label : eig_labels(n_, len)) tree_[label] = c.any_maybe("eig.node", 4);
  }
}

void EigConsensus::force_decided(Value v) {
  proposed_ = true;
  levels_ = t_ + 1;
  tree_.clear();
  for (std::uint32_t len = 0; len <= t_ + 1; ++len) {
    for (const auto& label : eig_labels(n_, len)) tree_[label] = v;
  }
}

}  // namespace ssbft
