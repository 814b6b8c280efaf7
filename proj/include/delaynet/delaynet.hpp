#pragma once

#include "delaynet/analysis.hpp"
#include "delaynet/cycles.hpp"
#include "delaynet/json_io.hpp"
#include "delaynet/network.hpp"
#include "delaynet/simulate.hpp"
#include "delaynet/timeshift.hpp"
