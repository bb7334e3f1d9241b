#pragma once

#include "supmart/error.hpp"
#include "supmart/linear_program.hpp"
#include "supmart/filtered_space.hpp"
#include "supmart/measure_set.hpp"
#include "supmart/process_calculus.hpp"
#include "supmart/decomposition.hpp"
#include "supmart/pricing.hpp"
#include "supmart/hedging.hpp"
#include "supmart/spec_io.hpp"
#include "supmart/cli.hpp"
