// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator

#include "skychan/channel_dump.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace skychan {

namespace {

constexpr std::array<char, 4> kMagic = {'S', 'K', 'C', 'H'};

template <typename T>
void store_le(std::ofstream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T load_le(std::ifstream& in, const std::string& path) {
    std::array<unsigned char, sizeof(T)> bytes;
    if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
        throw std::runtime_error("truncated channel dump '" + path + "'");
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace

void write_channel_dump(const std::string& path, const ChannelTensor& tensor) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");

    out.write(kMagic.data(), kMagic.size());
    store_le<std::uint16_t>(out, kDumpVersion);
    store_le<double>(out, tensor.fc_hz);
    store_le<double>(out, tensor.rate_hz);
    store_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensor.n_paths));
    store_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensor.n_snapshots));
    for (const auto& c : tensor.h) {
        store_le<double>(out, c.real());
        store_le<double>(out, c.imag());
    }
    for (double tau : tensor.tau_s)
        store_le<double>(out, tau);
    for (double t : tensor.timestamps_s)
        store_le<double>(out, t);

    if (!out)
        throw std::runtime_error("write failed for '" + path + "'");
}

ChannelTensor read_channel_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open channel dump '" + path + "'");

    std::array<char, 4> magic;
    if (!in.read(magic.data(), magic.size()) || magic != kMagic)
        throw std::runtime_error("'" + path + "' is not a channel dump (bad magic)");
    auto version = load_le<std::uint16_t>(in, path);
    if (version != kDumpVersion)
        throw std::runtime_error("unsupported channel dump version " +
                                 std::to_string(version) + " in '" + path + "'");

    ChannelTensor t;
    t.fc_hz = load_le<double>(in, path);
    t.rate_hz = load_le<double>(in, path);
    auto n_paths = load_le<std::uint32_t>(in, path);
    auto n_snapshots = load_le<std::uint32_t>(in, path);
    t.resize(n_paths, n_snapshots);

    for (auto& c : t.h) {
        double re = load_le<double>(in, path);
        double im = load_le<double>(in, path);
        c = {re, im};
    }
    for (auto& tau : t.tau_s)
        tau = load_le<double>(in, path);
    for (auto& ts : t.timestamps_s)
        ts = load_le<double>(in, path);
    return t;
}

void write_channel_csv(const std::string& path, const ChannelTensor& tensor) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "path,snapshot,t_s,h_re,h_im,tau_s\n";
    for (std::size_t l = 0; l < tensor.n_paths; ++l)
        for (std::size_t t = 0; t < tensor.n_snapshots; ++t)
            out << l << ',' << t << ',' << fmt(tensor.timestamps_s[t]) << ','
                << fmt(tensor.at(l, t).real()) << ',' << fmt(tensor.at(l, t).imag()) << ','
                << fmt(tensor.tau_at(l, t)) << '\n';
    if (!out)
        throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace skychan
