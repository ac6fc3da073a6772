/// @file  trilens.hpp
/// @brief Umbrella header.

#pragma once

#include "trilens/classify.hpp"
#include "trilens/cluster.hpp"
#include "trilens/datasets.hpp"
#include "trilens/depth.hpp"
#include "trilens/eigensolve.hpp"
#include "trilens/errors.hpp"
#include "trilens/io.hpp"
#include "trilens/kmeans.hpp"
#include "trilens/metrics.hpp"
#include "trilens/oracle.hpp"
#include "trilens/parallel.hpp"
#include "trilens/proxgraph.hpp"
#include "trilens/rng.hpp"
#include "trilens/sampling.hpp"
#include "trilens/statements.hpp"
