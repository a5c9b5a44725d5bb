// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#pragma once

namespace skychan {

inline constexpr const char* kVersion = "0.1.0";

} // namespace skychan
