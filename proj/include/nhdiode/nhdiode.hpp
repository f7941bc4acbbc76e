#pragma once

#include "nhdiode/analytic.hpp"
#include "nhdiode/core.hpp"
#include "nhdiode/dynamics.hpp"
#include "nhdiode/errors.hpp"
#include "nhdiode/solver.hpp"
#include "nhdiode/symmetry.hpp"
#include "nhdiode/transfer.hpp"
#include "nhdiode/util.hpp"
#include "nhdiode/version.hpp"
