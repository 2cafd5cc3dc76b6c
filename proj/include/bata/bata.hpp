#pragma once

// Everything except the verification oracles.

#include "bata/core/error.hpp"
#include "bata/core/grid.hpp"
#include "bata/core/metric.hpp"
#include "bata/linops/convolution.hpp"
#include "bata/linops/difference.hpp"
#include "bata/linops/fft2.hpp"
#include "bata/linops/mask.hpp"
#include "bata/linops/rotate.hpp"
#include "bata/prox/mri_data.hpp"
#include "bata/prox/outer.hpp"
#include "bata/prox/smoothed_tv.hpp"
#include "bata/inner/forward_backward.hpp"
#include "bata/inner/pdps.hpp"
#include "bata/adjoint/dense.hpp"
#include "bata/adjoint/krylov.hpp"
#include "bata/adjoint/pdps_system.hpp"
#include "bata/adjoint/scheme.hpp"
#include "bata/driver/bata.hpp"
#include "bata/driver/method.hpp"
#include "bata/io/config.hpp"
#include "bata/io/image.hpp"
#include "bata/problems/deblur.hpp"
#include "bata/problems/mri.hpp"
#include "bata/problems/quadratic.hpp"
