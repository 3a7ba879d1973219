#pragma once

// Umbrella header: the whole toolkit.

#include "seedgnn/assignment.hpp"
#include "seedgnn/baselines.hpp"
#include "seedgnn/bench.hpp"
#include "seedgnn/generate.hpp"
#include "seedgnn/graph.hpp"
#include "seedgnn/matrix.hpp"
#include "seedgnn/model.hpp"
#include "seedgnn/nn.hpp"
#include "seedgnn/pair_features.hpp"
#include "seedgnn/rng.hpp"
