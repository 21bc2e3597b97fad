#pragma once

// Umbrella header.

#include "tadp/attacks.hpp"
#include "tadp/baselines.hpp"
#include "tadp/config.hpp"
#include "tadp/csv.hpp"
#include "tadp/dataset.hpp"
#include "tadp/errors.hpp"
#include "tadp/experiments.hpp"
#include "tadp/learners.hpp"
#include "tadp/mechanism.hpp"
#include "tadp/metrics.hpp"
#include "tadp/rng.hpp"
#include "tadp/stats.hpp"
#include "tadp/theory.hpp"
