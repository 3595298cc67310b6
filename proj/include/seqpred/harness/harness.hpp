#pragma once

#include "seqpred/harness/config.hpp"
#include "seqpred/harness/measure_spec.hpp"
#include "seqpred/harness/probe.hpp"
#include "seqpred/harness/report.hpp"
#include "seqpred/harness/roster.hpp"
#include "seqpred/harness/scenarios.hpp"
#include "seqpred/harness/sweep.hpp"
#include "seqpred/harness/verify.hpp"
