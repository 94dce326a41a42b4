#pragma once

#include "hetsim/core_model.hpp"
#include "hetsim/engine.hpp"
#include "hetsim/explorer.hpp"
#include "hetsim/io.hpp"
#include "hetsim/metrics.hpp"
#include "hetsim/version.hpp"
#include "hetsim/workload_model.hpp"
