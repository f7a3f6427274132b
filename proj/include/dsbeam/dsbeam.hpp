#ifndef DSBEAM_DSBEAM_HPP
#define DSBEAM_DSBEAM_HPP

#include "dsbeam/beamformer.hpp"
#include "dsbeam/error.hpp"
#include "dsbeam/experiment.hpp"
#include "dsbeam/export.hpp"
#include "dsbeam/geometry.hpp"
#include "dsbeam/metrics.hpp"
#include "dsbeam/svg.hpp"
#include "dsbeam/synthesis.hpp"
#include "dsbeam/wav.hpp"

#endif
