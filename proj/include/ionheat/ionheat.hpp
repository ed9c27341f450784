#pragma once

#include "ionheat/errors.hpp"
#include "ionheat/integrator.hpp"
#include "ionheat/observables.hpp"
#include "ionheat/potential.hpp"
#include "ionheat/random.hpp"
#include "ionheat/spectra.hpp"
#include "ionheat/state.hpp"
#include "ionheat/statics.hpp"
#include "ionheat/thermostat.hpp"
#include "ionheat/units.hpp"
#include "ionheat/harness/checkpoint.hpp"
#include "ionheat/harness/config.hpp"
#include "ionheat/harness/ensemble.hpp"
#include "ionheat/harness/output.hpp"
#include "ionheat/harness/presets.hpp"
#include "ionheat/harness/validate.hpp"
