#pragma once

#include "dualmix/borel.hpp"
#include "dualmix/cascade.hpp"
#include "dualmix/characterize.hpp"
#include "dualmix/errors.hpp"
#include "dualmix/forecast.hpp"
#include "dualmix/kernels.hpp"
#include "dualmix/likelihood.hpp"
#include "dualmix/mixtures.hpp"
#include "dualmix/optimize.hpp"
#include "dualmix/simulate.hpp"
