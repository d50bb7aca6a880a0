#pragma once

#include "msplit/embedding.hpp"
#include "msplit/enumerate.hpp"
#include "msplit/gso.hpp"
#include "msplit/instance.hpp"
#include "msplit/lll.hpp"
#include "msplit/matrix.hpp"
#include "msplit/oracle.hpp"
#include "msplit/rng.hpp"
#include "msplit/solver.hpp"
