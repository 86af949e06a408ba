#pragma once

// Umbrella header.

#include "mvkpca/errors.hpp"
#include "mvkpca/linalg.hpp"
#include "mvkpca/random.hpp"
#include "mvkpca/kernels.hpp"
#include "mvkpca/core.hpp"
#include "mvkpca/stiefel.hpp"
#include "mvkpca/training.hpp"
#include "mvkpca/inference.hpp"
#include "mvkpca/forecasting.hpp"
#include "mvkpca/serialization.hpp"
#include "mvkpca/experiment.hpp"
