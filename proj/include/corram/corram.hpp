#pragma once

#include "corram/common.hpp"
#include "corram/core.hpp"
#include "corram/figures.hpp"
#include "corram/fisher.hpp"
#include "corram/math.hpp"
#include "corram/phase.hpp"
#include "corram/qdyne.hpp"
#include "corram/rng.hpp"
#include "corram/sweep.hpp"
#include "corram/table.hpp"
