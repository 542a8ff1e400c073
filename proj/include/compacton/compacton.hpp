#pragma once

#include "compacton/errors.hpp"
#include "compacton/grid.hpp"
#include "compacton/pade_operators.hpp"
#include "compacton/symbol_series.hpp"
#include "compacton/cyclic_penta.hpp"
#include "compacton/compacton_theory.hpp"
#include "compacton/knn_dynamics.hpp"
#include "compacton/diagnostics.hpp"
#include "compacton/config.hpp"
#include "compacton/experiment.hpp"
#include "compacton/table1.hpp"
