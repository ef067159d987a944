#pragma once

#include "peakdispatch/battery.hpp"
#include "peakdispatch/benchmark.hpp"
#include "peakdispatch/branch_bound.hpp"
#include "peakdispatch/bundle.hpp"
#include "peakdispatch/calendar.hpp"
#include "peakdispatch/context.hpp"
#include "peakdispatch/errors.hpp"
#include "peakdispatch/lp_format.hpp"
#include "peakdispatch/milp.hpp"
#include "peakdispatch/milp_build.hpp"
#include "peakdispatch/peakprob.hpp"
#include "peakdispatch/pipeline.hpp"
#include "peakdispatch/pvforecast.hpp"
#include "peakdispatch/rng.hpp"
#include "peakdispatch/scengen.hpp"
#include "peakdispatch/series.hpp"
#include "peakdispatch/settle.hpp"
#include "peakdispatch/simplex.hpp"
#include "peakdispatch/synth.hpp"
#include "peakdispatch/tariff.hpp"
