#pragma once

#include "irig/bounds.hpp"
#include "irig/config.hpp"
#include "irig/dataset.hpp"
#include "irig/format.hpp"
#include "irig/generators.hpp"
#include "irig/geometry.hpp"
#include "irig/metrics.hpp"
#include "irig/oracles.hpp"
#include "irig/rng.hpp"
#include "irig/schedule.hpp"
#include "irig/solver.hpp"
#include "irig/vectors.hpp"
