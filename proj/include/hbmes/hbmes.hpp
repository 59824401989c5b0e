#pragma once

// Umbrella header for the whole library.

#include "hbmes/action_space.hpp"
#include "hbmes/baselines.hpp"
#include "hbmes/config.hpp"
#include "hbmes/csvio.hpp"
#include "hbmes/ddqn.hpp"
#include "hbmes/devices.hpp"
#include "hbmes/dispatch.hpp"
#include "hbmes/errors.hpp"
#include "hbmes/experiment.hpp"
#include "hbmes/net.hpp"
#include "hbmes/net_ops.hpp"
#include "hbmes/observation.hpp"
#include "hbmes/oracle.hpp"
#include "hbmes/params.hpp"
#include "hbmes/policy.hpp"
#include "hbmes/repair.hpp"
#include "hbmes/replay.hpp"
#include "hbmes/rewards.hpp"
#include "hbmes/rng.hpp"
#include "hbmes/settlement.hpp"
#include "hbmes/state.hpp"
#include "hbmes/traces.hpp"
#include "hbmes/trainer.hpp"
