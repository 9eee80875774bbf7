#pragma once

#include <cstdint>

namespace hetsim::units {

inline constexpr std::uint64_t kKiB = 1024;
inline constexpr std::uint64_t kMiB = 1024 * 1024;
inline constexpr double kGiga = 1e9;
inline constexpr double kPico = 1e-12;
inline constexpr double kMilli = 1e-3;

// Cost math runs in MACs. FLOPs only appear in reports, through to_flops().
inline constexpr double kFlopsPerMac = 2.0;

inline constexpr double to_flops(double macs) { return macs * kFlopsPerMac; }

// One 8-bit parameter used once per MAC: 1 MAC per parameter byte per use.
inline constexpr double kMacsPerByteSingleUse = 1.0;

}  // namespace hetsim::units
