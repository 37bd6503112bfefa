#pragma once

#include "ringflow/version.hpp"
#include "ringflow/kernel.hpp"
#include "ringflow/eigensolve.hpp"
#include "ringflow/single_particle.hpp"
#include "ringflow/two_particle.hpp"
#include "ringflow/boson_bound.hpp"
#include "ringflow/fermion_bound.hpp"
#include "ringflow/complex_states.hpp"
#include "ringflow/scan.hpp"
#include "ringflow/figures.hpp"
#include "ringflow/pipeline.hpp"
