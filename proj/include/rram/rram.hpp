#pragma once

#include "rram/adder.hpp"
#include "rram/crossbar.hpp"
#include "rram/device.hpp"
#include "rram/parallel.hpp"
#include "rram/programming.hpp"
#include "rram/rng.hpp"
#include "rram/scouting.hpp"
#include "rram/stats.hpp"
#include "rram/threshold.hpp"
