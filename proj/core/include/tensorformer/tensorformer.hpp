#pragma once

// Umbrella header for the tensorformer core library.

#include "tensorformer/attention.hpp"
#include "tensorformer/checkpoint.hpp"
#include "tensorformer/common.hpp"
#include "tensorformer/config.hpp"
#include "tensorformer/grad_check.hpp"
#include "tensorformer/kdtree.hpp"
#include "tensorformer/marching_cubes.hpp"
#include "tensorformer/mesh.hpp"
#include "tensorformer/metrics.hpp"
#include "tensorformer/mlp.hpp"
#include "tensorformer/neighborhood.hpp"
#include "tensorformer/network.hpp"
#include "tensorformer/oracle.hpp"
#include "tensorformer/pointcloud.hpp"
#include "tensorformer/rng.hpp"
#include "tensorformer/sampling.hpp"
#include "tensorformer/tensor.hpp"
#include "tensorformer/vec3.hpp"
#include "tensorformer/voxelgrid.hpp"
