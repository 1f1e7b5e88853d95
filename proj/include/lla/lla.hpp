#pragma once

// Everything in one include.

#include "lla/commitment.hpp"
#include "lla/equilibrium.hpp"
#include "lla/experiments.hpp"
#include "lla/game.hpp"
#include "lla/game_io.hpp"
#include "lla/lookahead.hpp"
#include "lla/optim/branch_and_bound.hpp"
#include "lla/optim/lp_format.hpp"
#include "lla/optim/problem.hpp"
#include "lla/optim/simplex.hpp"
#include "lla/poker.hpp"
#include "lla/random_game.hpp"
#include "lla/reductions.hpp"
#include "lla/rng.hpp"
#include "lla/sequence_form.hpp"
#include "lla/table_io.hpp"
