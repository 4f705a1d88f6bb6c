#pragma once

#include "satinit/activity.hpp"
#include "satinit/cnf.hpp"
#include "satinit/gp.hpp"
#include "satinit/harness.hpp"
#include "satinit/program.hpp"
#include "satinit/rng.hpp"
#include "satinit/solver.hpp"

namespace satinit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace satinit
