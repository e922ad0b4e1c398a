#pragma once

#include "noma/baselines.hpp"
#include "noma/errors.hpp"
#include "noma/experiments.hpp"
#include "noma/pf_solver.hpp"
#include "noma/rate_model.hpp"
#include "noma/scenario.hpp"
#include "noma/scenario_io.hpp"
#include "noma/table.hpp"
