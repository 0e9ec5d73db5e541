#pragma once

#include "tightbell/classical.hpp"
#include "tightbell/error.hpp"
#include "tightbell/facegeom.hpp"
#include "tightbell/game.hpp"
#include "tightbell/named_games.hpp"
#include "tightbell/nlc.hpp"
#include "tightbell/qsdp.hpp"
#include "tightbell/rational.hpp"
