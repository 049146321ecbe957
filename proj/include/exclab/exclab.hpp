#pragma once

#include "exclab/bitstring.hpp"
#include "exclab/bounds.hpp"
#include "exclab/classical.hpp"
#include "exclab/config.hpp"
#include "exclab/game.hpp"
#include "exclab/pbr.hpp"
#include "exclab/qcore.hpp"
#include "exclab/rng.hpp"
#include "exclab/steering.hpp"
