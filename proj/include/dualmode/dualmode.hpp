#pragma once

// Dual-mode offloading system analysis: stability regions, delay-optimal
// resource partitions and job assignment, the tunable-mode benchmark, and a
// discrete-event simulator for validating the closed forms.

#include "dualmode/allocation.hpp"
#include "dualmode/assignment.hpp"
#include "dualmode/error.hpp"
#include "dualmode/model.hpp"
#include "dualmode/rng.hpp"
#include "dualmode/sim.hpp"
#include "dualmode/stability.hpp"
#include "dualmode/stats.hpp"
#include "dualmode/tunable.hpp"
