#pragma once

#include "hyrelax/execution.hpp"
#include "hyrelax/filippov.hpp"
#include "hyrelax/geometry.hpp"
#include "hyrelax/integrator.hpp"
#include "hyrelax/metric.hpp"
#include "hyrelax/model.hpp"
#include "hyrelax/registry.hpp"
#include "hyrelax/relaxation.hpp"
#include "hyrelax/sensitivity.hpp"
#include "hyrelax/sweep.hpp"
#include "hyrelax/system_io.hpp"
#include "hyrelax/trajectory.hpp"

namespace hyrelax {

const char* version();

}  // namespace hyrelax
