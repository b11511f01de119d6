#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "ssbft/recyclable_object.hpp"

namespace ssbft {

/// Slots kept alive for index `ind`: { y mod index_num : y in [z - log_size, z] } with
/// z = index_num + ind. Returned in ascending slot order. `ind` is reduced modulo
/// index_num first.
std::vector<std::uint32_t> window(std::uint64_t ind, std::uint32_t index_num,
                                  std::uint32_t log_size);

bool in_window(std::uint32_t slot, std::uint64_t ind, std::uint32_t index_num,
               std::uint32_t log_size);

using CoreFactory = std::function<std::unique_ptr<AsyncCore>(std::uint32_t slot)>;

/// Fixed array of recyclable objects at one node.
class ObjectArray {
 public:
  ObjectArray(NodeId self, std::uint32_t n, std::uint32_t t, std::uint32_t index_num,
              std::uint32_t log_size, const CoreFactory& make_core);

  std::uint32_t size() const { return static_cast<std::uint32_t>(objs_.size()); }
  RecyclableObject& at(std::uint32_t slot) { return objs_.at(slot); }
  const RecyclableObject& at(std::uint32_t slot) const { return objs_.at(slot); }

  /// Recycles every slot outside window(index). Returns the slots that were not fresh.
  std::vector<std::uint32_t> recycler_pulse(std::uint64_t index);

  std::uint32_t non_fresh() const;

 private:
  std::uint32_t index_num_;
  std::uint32_t log_size_;
  std::vector<RecyclableObject> objs_;
};

}  // namespace ssbft
