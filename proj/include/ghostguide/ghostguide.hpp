#pragma once

#include "ghostguide/coupling.hpp"
#include "ghostguide/error.hpp"
#include "ghostguide/homogeneous.hpp"
#include "ghostguide/parallel.hpp"
#include "ghostguide/phi_sums.hpp"
#include "ghostguide/quadrature.hpp"
#include "ghostguide/random_imaging.hpp"
#include "ghostguide/reflectivity.hpp"
#include "ghostguide/resolution.hpp"
#include "ghostguide/scattering.hpp"
#include "ghostguide/scenario.hpp"
#include "ghostguide/waveguide.hpp"
