#pragma once

// Ricci flow on rotationally symmetric 2-spheres with Cheeger isoperimetric
// diagnostics: geometry, loop functionals, the flow integrator, identity
// residuals, named scenarios, and the batch runner.

#include "cheeger_flow/grid.hpp"
#include "cheeger_flow/surface.hpp"
#include "cheeger_flow/loop_functionals.hpp"
#include "cheeger_flow/flow_trace.hpp"
#include "cheeger_flow/ricci_flow.hpp"
#include "cheeger_flow/identities.hpp"
#include "cheeger_flow/scenarios.hpp"
#include "cheeger_flow/config.hpp"
#include "cheeger_flow/runner.hpp"
