#include "ssbft/recyclable_object.hpp"

#include <algorithm>
#include <stdexcept>

namespace ssbft {

RecyclableObject::RecyclableObject(NodeId self, std::uint32_t n, std::uint32_t t,
                                   std::unique_ptr<AsyncCore> core)
    : self_(self), n_(n), t_(t), core_(std::move(core)), delivered_(n, false) {
  if (!core_) throw std::invalid_argument("RecyclableObject: null core");
  if (self_ >= n_) throw std::invalid_argument("RecyclableObject: node id out of range");
}

RecyclableObject::RecyclableObject(const RecyclableObject& other)
    : self_(other.self_),
      n_(other.n_),
      t_(other.t_),
      core_(other.core_->clone()),
      delivered_(other.delivered_) {}

RecyclableObject& RecyclableObject::operator=(const RecyclableObject& other) {
  if (this != &other) {
    self_ = other.self_;
    n_ = other.n_;
    t_ = other.t_;
    core_ = other.core_->clone();
    delivered_ = other.delivered_;
  }
  return *this;
}

void RecyclableObject::propose(Bit v) {
  if (v > 1) throw std::invalid_argument("RecyclableObject::propose: value must be binary");
  if (core_->proposal()) return;
  core_->propose(v);
}

ObjectResult RecyclableObject::result() {
  ObjectResult r = core_->decided();
  if (!is_bottom(r)) delivered_[self_] = true;
  return r;
}

bool RecyclableObject::was_delivered() const {
  auto count = static_cast<std::uint32_t>(std::count(delivered_.begin(), delivered_.end(), true));
  return count >= n_ - t_;
}

void RecyclableObject::recycle() {
  core_->reset();
  std::fill(delivered_.begin(), delivered_.end(), false);
}

EstPayload RecyclableObject::pulse_step(std::span<const std::optional<EstPayload>> inbox,
                                        const StepContext& ctx) {
  // consistency test
  if (is_bottom(result())) delivered_[self_] = false;

  std::vector<std::optional<CoreMessage>> core_inbox(n_);
  for (NodeId j = 0; j < n_ && j < inbox.size(); ++j) {
    if (!inbox[j]) continue;
    core_inbox[j] = inbox[j]->core;
    // The local indication is owned by result(); our own echo from the last round is stale.
    if (j != self_) delivered_[j] = inbox[j]->delivered;
  }

  CoreMessage out = core_->step(core_inbox, ctx);
  return EstPayload{out, delivered_[self_]};
}

bool RecyclableObject::is_fresh() const {
  return core_->is_initial() &&
         std::none_of(delivered_.begin(), delivered_.end(), [](bool b) { return b; });
}

void RecyclableObject::corrupt(Corruptor& c) {
  core_->corrupt(c);
  for (std::size_t j = 0; j < delivered_.size(); ++j) delivered_[j] = c.any_bool("delivered");
}

}  // namespace ssbft
