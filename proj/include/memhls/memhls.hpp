#pragma once

// Umbrella header.

#include "memhls/benchmarks.hpp"
#include "memhls/binder.hpp"
#include "memhls/error.hpp"
#include "memhls/explorer.hpp"
#include "memhls/mcg.hpp"
#include "memhls/memory_map.hpp"
#include "memhls/report.hpp"
#include "memhls/schedule.hpp"
#include "memhls/scheduler.hpp"
#include "memhls/sfg.hpp"
#include "memhls/sfg_text.hpp"
#include "memhls/timing.hpp"
#include "memhls/verify.hpp"
