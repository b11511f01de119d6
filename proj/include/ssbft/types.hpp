#pragma once

#include <cstdint>
#include <optional>

namespace ssbft {

using NodeId = std::uint32_t;
using Round = std::uint64_t;
using Phase = std::uint32_t;
using Value = std::uint64_t;

// A binary value; anything other than 0/1 is rejected at the boundary where it enters.
using Bit = std::uint8_t;

// A value that may be absent (⊥).
using MaybeValue = std::optional<Value>;

}  // namespace ssbft
