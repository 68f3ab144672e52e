#pragma once

// Umbrella header.
#include "psig/cc.hpp"
#include "psig/common.hpp"
#include "psig/config.hpp"
#include "psig/csv.hpp"
#include "psig/dataset.hpp"
#include "psig/eval.hpp"
#include "psig/indexer.hpp"
#include "psig/linker.hpp"
#include "psig/pipeline.hpp"
#include "psig/records.hpp"
#include "psig/sigprob.hpp"
#include "psig/synth.hpp"
#include "psig/templates.hpp"
