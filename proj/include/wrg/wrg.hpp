#pragma once

#include "error.hpp"
#include "rng.hpp"
#include "union_find.hpp"
#include "regular_graph.hpp"
#include "weights.hpp"
#include "spectral.hpp"
#include "variational.hpp"
#include "decomposition.hpp"
#include "stats.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "experiments.hpp"
