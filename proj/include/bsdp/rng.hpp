#pragma once

#include <cstdint>
#include <random>

namespace bsdp {

using Rng = std::mt19937_64;

// Independent engine per (seed, stream). Agents keep network init, prior
// init and runtime draws on separate streams so that construction
// differences between algorithm variants (e.g. whether priors are drawn at
// all) never shift the draw sequence of another stream.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

namespace stream {
inline constexpr std::uint64_t kTrainableInit = 0x11;
inline constexpr std::uint64_t kPriorInit = 0x22;
inline constexpr std::uint64_t kEnvironment = 0x33;
inline constexpr std::uint64_t kRun = 0x44;
}  // namespace stream

}  // namespace bsdp
