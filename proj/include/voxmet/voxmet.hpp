#pragma once

// Umbrella header for the voxmet library: voxel volume I/O, synthetic
// phantom generation, slice-and-fuse 3D detection, binary ROI segmentation
// with three-view fusion, 3D metrology, and evaluation metrics.

#include "voxmet/annotations.hpp"
#include "voxmet/decimal.hpp"
#include "voxmet/detect.hpp"
#include "voxmet/errors.hpp"
#include "voxmet/fuse.hpp"
#include "voxmet/geometry.hpp"
#include "voxmet/labeling.hpp"
#include "voxmet/metrics.hpp"
#include "voxmet/metrology.hpp"
#include "voxmet/morphology.hpp"
#include "voxmet/parallel.hpp"
#include "voxmet/phantom.hpp"
#include "voxmet/rng.hpp"
#include "voxmet/segment.hpp"
#include "voxmet/threshold.hpp"
#include "voxmet/volume.hpp"
#include "voxmet/volume_io.hpp"
