#pragma once

// Umbrella header for the OCPC strategy layer and offline simulator.

#include "ocpc/auction.hpp"
#include "ocpc/bidopt.hpp"
#include "ocpc/calibration.hpp"
#include "ocpc/commands.hpp"
#include "ocpc/datagen.hpp"
#include "ocpc/domain.hpp"
#include "ocpc/errors.hpp"
#include "ocpc/log.hpp"
#include "ocpc/logio.hpp"
#include "ocpc/metrics.hpp"
#include "ocpc/objectives.hpp"
#include "ocpc/reports.hpp"
#include "ocpc/simulator.hpp"
