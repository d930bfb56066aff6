#pragma once

#include "rmp/algebra.hpp"
#include "rmp/joint_limits.hpp"
#include "rmp/kinematics.hpp"
#include "rmp/matops.hpp"
#include "rmp/policies.hpp"
#include "rmp/scenario.hpp"
#include "rmp/simulator.hpp"
#include "rmp/taskmap.hpp"
#include "rmp/tree.hpp"
#include "rmp/verify.hpp"
