/// Umbrella header for the leaky-piston coupling toolkit.
#pragma once

#include "leaky_piston/config.hpp"
#include "leaky_piston/csv.hpp"
#include "leaky_piston/dn_coupling.hpp"
#include "leaky_piston/experiments.hpp"
#include "leaky_piston/finite_difference.hpp"
#include "leaky_piston/model_core.hpp"
#include "leaky_piston/piston.hpp"
#include "leaky_piston/sensitivity.hpp"
#include "leaky_piston/volterra.hpp"
