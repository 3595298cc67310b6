#pragma once

#include "seqpred/alphabet.hpp"
#include "seqpred/counterexamples.hpp"
#include "seqpred/divergences.hpp"
#include "seqpred/dominance.hpp"
#include "seqpred/enumerate.hpp"
#include "seqpred/log_prob.hpp"
#include "seqpred/measure.hpp"
#include "seqpred/predictors.hpp"
#include "seqpred/rng.hpp"
#include "seqpred/schedule.hpp"
