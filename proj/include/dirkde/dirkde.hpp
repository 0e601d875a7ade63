#pragma once

#include "dirkde/errors.hpp"
#include "dirkde/special.hpp"
#include "dirkde/quadrature.hpp"
#include "dirkde/sphere.hpp"
#include "dirkde/kernels.hpp"
#include "dirkde/models.hpp"
#include "dirkde/kde.hpp"
#include "dirkde/optimize.hpp"
#include "dirkde/mise.hpp"
#include "dirkde/amise.hpp"
#include "dirkde/montecarlo.hpp"
#include "dirkde/verify.hpp"

namespace dirkde {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dirkde
