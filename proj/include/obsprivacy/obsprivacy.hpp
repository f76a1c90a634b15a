#pragma once

#include "obsprivacy/error.hpp"
#include "obsprivacy/feasible_set.hpp"
#include "obsprivacy/graph.hpp"
#include "obsprivacy/quadrature.hpp"
#include "obsprivacy/gramian.hpp"
#include "obsprivacy/online.hpp"
#include "obsprivacy/oracle.hpp"
#include "obsprivacy/scenario.hpp"
#include "obsprivacy/scenario_io.hpp"
