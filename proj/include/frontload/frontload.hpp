#pragma once

#include "frontload/error.hpp"
#include "frontload/numerics/lagrange.hpp"
#include "frontload/numerics/precision.hpp"
#include "frontload/numerics/quadrature.hpp"
#include "frontload/pulses/gaussian.hpp"
#include "frontload/pulses/spectrum.hpp"
#include "frontload/pulses/wave.hpp"
#include "frontload/spin/advance.hpp"
#include "frontload/barrier/kernel.hpp"
#include "frontload/barrier/transmission.hpp"
#include "frontload/barrier/transmit.hpp"
#include "frontload/experiments/config.hpp"
#include "frontload/experiments/decoder.hpp"
#include "frontload/experiments/manifest.hpp"
#include "frontload/experiments/plot.hpp"
#include "frontload/experiments/scenarios.hpp"
