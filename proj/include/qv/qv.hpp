#pragma once

// Everything except io.hpp, which additionally needs nlohmann/json.

#include "qv/assignment.hpp"
#include "qv/branches.hpp"
#include "qv/cg.hpp"
#include "qv/dirichlet.hpp"
#include "qv/embed.hpp"
#include "qv/energy.hpp"
#include "qv/error.hpp"
#include "qv/extend.hpp"
#include "qv/grid.hpp"
#include "qv/parallel.hpp"
#include "qv/qspace.hpp"
#include "qv/qtuple.hpp"
#include "qv/random.hpp"
#include "qv/verify.hpp"
#include "qv/whitney_eta.hpp"
#include "qv/zeta.hpp"
