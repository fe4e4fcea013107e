#pragma once

#include "riesz/error.hpp"
#include "riesz/specfun.hpp"
#include "riesz/quadrature.hpp"
#include "riesz/parallel.hpp"
#include "riesz/measure.hpp"
#include "riesz/spectrum.hpp"
#include "riesz/mollify.hpp"
#include "riesz/energy.hpp"
#include "riesz/audit.hpp"
#include "riesz/dimension.hpp"
#include "riesz/io.hpp"
