#pragma once

#include <cstdint>

namespace splitnet {

// Stands in for a process's (unbounded) original name.
using ProcessId = std::uint32_t;

// Dense splitter index; doubles as the name a process acquires by stopping.
using NodeId = std::uint32_t;

}  // namespace splitnet
