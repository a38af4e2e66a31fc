#pragma once

#include "analysis.hpp"
#include "mechanisms.hpp"
#include "model.hpp"
#include "numeric.hpp"
#include "solver.hpp"
#include "sweep.hpp"
