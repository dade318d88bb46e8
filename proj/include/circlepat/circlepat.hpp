#pragma once

#include "circlepat/error.hpp"
#include "circlepat/types.hpp"
#include "circlepat/mesh.hpp"
#include "circlepat/pattern.hpp"
#include "circlepat/period_space.hpp"
#include "circlepat/hodge.hpp"
#include "circlepat/moduli.hpp"
#include "circlepat/penner.hpp"
#include "circlepat/lattice_example.hpp"
#include "circlepat/io.hpp"
#include "circlepat/svg.hpp"
