#pragma once

#include "propest/config.hpp"
#include "propest/error.hpp"
#include "propest/estimators.hpp"
#include "propest/io.hpp"
#include "propest/montecarlo.hpp"
#include "propest/population.hpp"
#include "propest/rng.hpp"
#include "propest/sensitivity.hpp"
#include "propest/theory.hpp"
