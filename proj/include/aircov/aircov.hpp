#pragma once

// Visual area coverage by altitude-constrained aerial agents: quality-weighted
// sensed-space partitioning, gradient control laws and a deterministic
// closed-loop simulator, with independent numerical oracles.

#include "aircov/clip.hpp"
#include "aircov/config.hpp"
#include "aircov/control.hpp"
#include "aircov/geometry.hpp"
#include "aircov/io.hpp"
#include "aircov/oracle.hpp"
#include "aircov/partition.hpp"
#include "aircov/quality.hpp"
#include "aircov/sim.hpp"
