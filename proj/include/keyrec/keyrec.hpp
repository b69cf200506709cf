#pragma once

#include "keyrec/bitstring.hpp"
#include "keyrec/channel.hpp"
#include "keyrec/costs.hpp"
#include "keyrec/enumeration.hpp"
#include "keyrec/experiment.hpp"
#include "keyrec/grover.hpp"
#include "keyrec/lowmc.hpp"
#include "keyrec/prng.hpp"
#include "keyrec/rank.hpp"
#include "keyrec/search.hpp"
