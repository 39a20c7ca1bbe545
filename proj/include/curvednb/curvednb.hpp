#pragma once

/// Umbrella header: the whole library in dependency order.

#include "curvednb/errors.hpp"
#include "curvednb/ktrig.hpp"
#include "curvednb/linalg.hpp"
#include "curvednb/geometry.hpp"
#include "curvednb/lagrangian_oracle.hpp"
#include "curvednb/potentials.hpp"
#include "curvednb/dynamics.hpp"
#include "curvednb/integrate.hpp"
#include "curvednb/convergence_report.hpp"
#include "curvednb/continuation.hpp"
#include "curvednb/scenario.hpp"
#include "curvednb/verify.hpp"
