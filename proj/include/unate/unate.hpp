#pragma once

#include "unate/rng.hpp"
#include "unate/hypercube.hpp"
#include "unate/stats.hpp"
#include "unate/truth_table.hpp"
#include "unate/oracle.hpp"
#include "unate/edges.hpp"
#include "unate/ae_search.hpp"
#include "unate/edge_stats.hpp"
#include "unate/exact.hpp"
#include "unate/analysis.hpp"
#include "unate/testers.hpp"
#include "unate/harness.hpp"
