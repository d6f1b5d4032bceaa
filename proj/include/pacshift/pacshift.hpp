#pragma once

#include "pacshift/bits.hpp"
#include "pacshift/concepts.hpp"
#include "pacshift/core.hpp"
#include "pacshift/distributions.hpp"
#include "pacshift/harness/config.hpp"
#include "pacshift/harness/experiments.hpp"
#include "pacshift/harness/report.hpp"
#include "pacshift/learners.hpp"
#include "pacshift/parallel.hpp"
#include "pacshift/prg.hpp"
#include "pacshift/sampling.hpp"
#include "pacshift/stats.hpp"
