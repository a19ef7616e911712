#pragma once

#include "vsm/transition/bm_table.hpp"
#include "vsm/transition/density.hpp"
#include "vsm/transition/talbot.hpp"
