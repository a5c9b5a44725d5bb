// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#pragma once

#include <string>

#include "skychan/channel_tensor.hpp"

namespace skychan {

/// Binary channel dump, little-endian:
///   magic "SKCH", version u16, fc f64 [Hz], rate f64 [Hz], L u32, T u32,
///   row-major f64 (re, im) pairs of h [L*T], row-major f64 tau [L*T],
///   f64 timestamps [T].
inline constexpr std::uint16_t kDumpVersion = 1;

void write_channel_dump(const std::string& path, const ChannelTensor& tensor);

/// Throws std::runtime_error on a missing file, bad magic, unsupported
/// version, or truncation.
ChannelTensor read_channel_dump(const std::string& path);

/// Plain-text view for inspection: one row per (path, snapshot).
void write_channel_csv(const std::string& path, const ChannelTensor& tensor);

} // namespace skychan
