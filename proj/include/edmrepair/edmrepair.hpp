#pragma once

#include "approx.hpp"
#include "core.hpp"
#include "exact.hpp"
#include "feasibility.hpp"
#include "generators.hpp"
#include "geometry.hpp"
#include "io.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "scalar.hpp"
