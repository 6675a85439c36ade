#pragma once

#include "camplace/analysis.hpp"
#include "camplace/bitset.hpp"
#include "camplace/engine.hpp"
#include "camplace/error.hpp"
#include "camplace/geometry.hpp"
#include "camplace/mesh.hpp"
#include "camplace/rng.hpp"
#include "camplace/room.hpp"
#include "camplace/sampling.hpp"
#include "camplace/serialization.hpp"
#include "camplace/solver.hpp"
#include "camplace/supervoxel.hpp"
#include "camplace/visibility.hpp"
#include "camplace/voxel_grid.hpp"
