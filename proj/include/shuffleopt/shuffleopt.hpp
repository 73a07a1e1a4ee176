// Umbrella header: the whole library in one include.
#pragma once

#include "shuffleopt/common.hpp"
#include "shuffleopt/dense.hpp"
#include "shuffleopt/failures.hpp"
#include "shuffleopt/harness.hpp"
#include "shuffleopt/lp_format.hpp"
#include "shuffleopt/lpsolve.hpp"
#include "shuffleopt/metrics.hpp"
#include "shuffleopt/optmodel.hpp"
#include "shuffleopt/topology.hpp"
#include "shuffleopt/workload.hpp"
