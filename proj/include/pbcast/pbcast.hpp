#pragma once

#include "pbcast/calibrate.hpp"
#include "pbcast/centrality.hpp"
#include "pbcast/eigen.hpp"
#include "pbcast/engine.hpp"
#include "pbcast/error.hpp"
#include "pbcast/experiment.hpp"
#include "pbcast/graph.hpp"
#include "pbcast/matrix.hpp"
#include "pbcast/mixing.hpp"
#include "pbcast/rng.hpp"
#include "pbcast/schedule.hpp"
#include "pbcast/spsa.hpp"
