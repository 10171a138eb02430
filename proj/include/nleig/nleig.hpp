#pragma once

#include "nleig/error.hpp"
#include "nleig/fft.hpp"
#include "nleig/grid.hpp"
#include "nleig/kernels.hpp"
#include "nleig/nonlinearity.hpp"
#include "nleig/functionals.hpp"
#include "nleig/solver.hpp"
#include "nleig/asymptotics.hpp"
#include "nleig/io.hpp"
#include "nleig/config.hpp"
#include "nleig/cli.hpp"
