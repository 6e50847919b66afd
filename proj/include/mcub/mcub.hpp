#pragma once

#include "mcub/cubature.hpp"
#include "mcub/errors.hpp"
#include "mcub/frames.hpp"
#include "mcub/homogeneous.hpp"
#include "mcub/lattice.hpp"
#include "mcub/manifold.hpp"
#include "mcub/spectral.hpp"
#include "mcub/splines.hpp"
