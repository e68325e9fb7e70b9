#pragma once

#include "cavityqed/core.hpp"
#include "cavityqed/analytic.hpp"
#include "cavityqed/metrics.hpp"
#include "cavityqed/lindblad.hpp"
#include "cavityqed/optimizer.hpp"
#include "cavityqed/runs.hpp"
