#pragma once

#include "qhdyn/errors.hpp"
#include "qhdyn/evolution.hpp"
#include "qhdyn/grid.hpp"
#include "qhdyn/invariants.hpp"
#include "qhdyn/linalg.hpp"
#include "qhdyn/model.hpp"
#include "qhdyn/scenarios.hpp"
#include "qhdyn/tolerances.hpp"
#include "qhdyn/version.hpp"
