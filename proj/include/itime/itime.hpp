#pragma once

#include "itime/core.hpp"
#include "itime/dc_engine.hpp"
#include "itime/io.hpp"
#include "itime/multiscale.hpp"
#include "itime/scaling_stats.hpp"
#include "itime/synthetic.hpp"
