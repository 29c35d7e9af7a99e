// Copyright 2026 The usketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>

namespace usketch {

using Timestamp = std::int64_t;
using ElementId = std::uint32_t;

/// One stream event. Timestamps are non-decreasing along a stream and any
/// number of items may share one.
struct TimedItem {
  Timestamp timestamp = 0;
  ElementId id = 0;

  friend bool operator==(const TimedItem&, const TimedItem&) = default;
};

/// An item with timestamp t is active at time `now` iff now - window < t <= now.
inline bool is_active(Timestamp t, Timestamp now, Timestamp window) {
  return t <= now && t > now - window;
}

enum class Execution { kSerial, kParallel };

}  // namespace usketch
