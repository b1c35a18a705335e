#pragma once

#include <cstdint>

namespace ttms {

using TaskId = int;
using MsgId = int;
/// Shared id space for end systems, routers and links (6 bits on the wire).
using HwId = int;
/// Discrete time in ticks.
using Tick = std::int64_t;

} // namespace ttms
