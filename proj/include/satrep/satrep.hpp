#pragma once

#include "satrep/atmosphere.hpp"
#include "satrep/constants.hpp"
#include "satrep/error.hpp"
#include "satrep/linkbudget.hpp"
#include "satrep/montecarlo.hpp"
#include "satrep/noise.hpp"
#include "satrep/optics.hpp"
#include "satrep/orbital.hpp"
#include "satrep/repeater.hpp"
#include "satrep/scenario.hpp"
