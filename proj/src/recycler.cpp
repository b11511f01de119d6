#include "ssbft/recycler.hpp"

#include <algorithm>

#include "ssbft/env.hpp"

namespace ssbft {

std::vector<std::uint32_t> window(std::uint64_t ind, std::uint32_t index_num,
                                  std::uint32_t log_size) {
  if (index_num == 0) throw ParamError("window: index_num must be positive");
  if (log_size + 1 > index_num) throw ParamError("window: log_size must be below index_num");
  const std::uint64_t z = index_num + ind % index_num;
  std::vector<std::uint32_t> out;
  out.reserve(log_size + 1);
  for (std::uint64_t y = z - log_size; y <= z; ++y) {
    out.push_back(static_cast<std::uint32_t>(y % index_num));
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool in_window(std::uint32_t slot, std::uint64_t ind, std::uint32_t index_num,
               std::uint32_t log_size) {
  // Distance walking backwards from the anchor.
  const std::uint64_t anchor = ind % index_num;
  const std::uint64_t back = (anchor + index_num - slot % index_num) % index_num;
  return back <= log_size;
}

ObjectArray::ObjectArray(NodeId self, std::uint32_t n, std::uint32_t t, std::uint32_t index_num,
                         std::uint32_t log_size, const CoreFactory& make_core)
    : index_num_(index_num), log_size_(log_size) {
  if (log_size + 1 > index_num) throw ParamError("ObjectArray: log_size must be below index_num");
  objs_.reserve(index_num);
  for (std::uint32_t s = 0; s < index_num; ++s) objs_.emplace_back(self, n, t, make_core(s));
}

std::vector<std::uint32_t> ObjectArray::recycler_pulse(std::uint64_t index) {
  std::vector<std::uint32_t> recycled;
  for (std::uint32_t s = 0; s < index_num_; ++s) {
    if (in_window(s, index, index_num_, log_size_)) continue;
    if (!objs_[s].is_fresh()) recycled.push_back(s);
    objs_[s].recycle();
  }
  return recycled;
}

std::uint32_t ObjectArray::non_fresh() const {
  return static_cast<std::uint32_t>(
      std::count_if(objs_.begin(), objs_.end(), [](const auto& o) { return !o.is_fresh(); }));
}

}  // namespace ssbft
