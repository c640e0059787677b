#pragma once

#include "mapd/grid.hpp"
#include "mapd/instance.hpp"
#include "mapd/clock.hpp"
#include "mapd/task_state.hpp"
#include "mapd/task_planner.hpp"
#include "mapd/smtlib.hpp"
#include "mapd/goals.hpp"
#include "mapd/plan.hpp"
#include "mapd/mla_star.hpp"
#include "mapd/cbs.hpp"
#include "mapd/integrated.hpp"
#include "mapd/io.hpp"
