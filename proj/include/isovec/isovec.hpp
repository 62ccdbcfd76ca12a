#pragma once

#include "isovec/bounds.hpp"
#include "isovec/combinatorics.hpp"
#include "isovec/errors.hpp"
#include "isovec/linalg.hpp"
#include "isovec/montecarlo.hpp"
#include "isovec/mvee.hpp"
#include "isovec/random.hpp"
#include "isovec/reduction.hpp"
#include "isovec/selection.hpp"
#include "isovec/systems.hpp"
