#pragma once

#include "deepesn/common.hpp"
#include "deepesn/flat.hpp"
#include "deepesn/mso.hpp"
#include "deepesn/readout.hpp"
#include "deepesn/report.hpp"
#include "deepesn/reservoir.hpp"
#include "deepesn/rng.hpp"
#include "deepesn/spectral.hpp"
