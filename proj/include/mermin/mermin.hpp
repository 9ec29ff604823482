#pragma once

// Umbrella header for the whole library.

#include "mermin/algebra.hpp"
#include "mermin/characterization.hpp"
#include "mermin/errors.hpp"
#include "mermin/io.hpp"
#include "mermin/lhv.hpp"
#include "mermin/mermin_operator.hpp"
#include "mermin/optimize.hpp"
#include "mermin/random.hpp"
#include "mermin/sampler.hpp"
