#pragma once

#include "nlbe/commands.hpp"
#include "nlbe/config.hpp"
#include "nlbe/daughter.hpp"
#include "nlbe/diagnostics.hpp"
#include "nlbe/errors.hpp"
#include "nlbe/grid.hpp"
#include "nlbe/io.hpp"
#include "nlbe/kernel.hpp"
#include "nlbe/moments.hpp"
#include "nlbe/operators.hpp"
#include "nlbe/particle.hpp"
#include "nlbe/quadrature.hpp"
#include "nlbe/solver.hpp"
#include "nlbe/weight.hpp"
