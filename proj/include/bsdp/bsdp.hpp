#pragma once

#include "bsdp/agents.hpp"
#include "bsdp/diverse_prior.hpp"
#include "bsdp/ensemble.hpp"
#include "bsdp/envs.hpp"
#include "bsdp/harness/config.hpp"
#include "bsdp/harness/csv.hpp"
#include "bsdp/harness/experiment.hpp"
#include "bsdp/harness/gradcheck.hpp"
#include "bsdp/harness/metrics.hpp"
#include "bsdp/mlp.hpp"
#include "bsdp/ops.hpp"
#include "bsdp/optimizer.hpp"
#include "bsdp/replay.hpp"
#include "bsdp/rng.hpp"
