#pragma once

#include "vcsp/bit_matrix.hpp"
#include "vcsp/consistency.hpp"
#include "vcsp/errors.hpp"
#include "vcsp/ext_cost.hpp"
#include "vcsp/instance.hpp"
#include "vcsp/io.hpp"
#include "vcsp/maxflow.hpp"
#include "vcsp/mincut.hpp"
#include "vcsp/operations.hpp"
#include "vcsp/pipeline.hpp"
#include "vcsp/reduction.hpp"
#include "vcsp/solvers.hpp"
