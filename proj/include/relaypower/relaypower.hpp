#pragma once

#include "relaypower/core_model.hpp"
#include "relaypower/dlt.hpp"
#include "relaypower/mixed_envelope.hpp"
#include "relaypower/numerics.hpp"
#include "relaypower/rat_dl.hpp"
#include "relaypower/rat_wdl.hpp"
#include "relaypower/scenario.hpp"
#include "relaypower/simulator.hpp"
