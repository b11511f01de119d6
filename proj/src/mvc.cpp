#include "ssbft/mvc.hpp"

#include "ssbft/env.hpp"

namespace ssbft {

SsbftMvc::SsbftMvc(NodeId self, std::uint32_t n, std::uint32_t t, std::uint32_t kappa)
    : t_(t), kappa_(kappa), co_(self, n, t) {
  if (kappa < t + 1) throw ParamError("SsbftMvc: kappa must be at least t+1");
}

std::optional<CoField> SsbftMvc::pulse(Phase phase, std::span<const std::optional<CoField>> inbox,
                                       const std::function<Value()>& input) {
  if (phase == 0) {
    if (kappa_ == t_ + 1) co_.process(inbox);
    current_ = co_.result();
    co_.restart();
    return co_.propose(input());
  }
  if (phase <= t_) return co_.process(inbox);
  if (phase == t_ + 1) co_.process(inbox);
  return std::nullopt;
}

void SsbftMvc::corrupt(Corruptor& c) {
  current_ = c.any_maybe("mvc.current", 4);
  co_.corrupt(c);
}

}  // namespace ssbft
