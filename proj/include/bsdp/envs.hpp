#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "bsdp/envs/acrobot.hpp"
#include "bsdp/envs/binary_chain.hpp"
#include "bsdp/envs/cartpole.hpp"
#include "bsdp/envs/env.hpp"
#include "bsdp/envs/line1d.hpp"
#include "bsdp/envs/mountain_car.hpp"

namespace bsdp {

/// `rng` seeds construction-time randomness (the chain's hidden action
/// sequence); `chain_n` is only read for binary_chain.
inline std::unique_ptr<Environment> make_env(const std::string& name,
                                             int chain_n, Rng& rng) {
  if (name == "binary_chain")
    return std::make_unique<BinaryChainEnv>(chain_n, rng);
  if (name == "cartpole") return std::make_unique<CartPoleEnv>();
  if (name == "mountain_car") return std::make_unique<MountainCarEnv>();
  if (name == "acrobot") return std::make_unique<AcrobotEnv>();
  if (name == "line1d") return std::make_unique<Line1dEnv>();
  throw std::invalid_argument("unknown environment: " + name);
}

}  // namespace bsdp
