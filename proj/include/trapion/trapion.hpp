#pragma once

#include "trapion/errors.hpp"
#include "trapion/specfun.hpp"
#include "trapion/trapping.hpp"
#include "trapion/rates.hpp"
#include "trapion/kernel.hpp"
#include "trapion/engine.hpp"
#include "trapion/montecarlo.hpp"
#include "trapion/config.hpp"
#include "trapion/csv.hpp"
