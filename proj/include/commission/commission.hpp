#pragma once

#include "commission/drive.hpp"
#include "commission/error.hpp"
#include "commission/gp.hpp"
#include "commission/kv_config.hpp"
#include "commission/metrics.hpp"
#include "commission/pareto.hpp"
#include "commission/rng.hpp"
#include "commission/runner.hpp"
#include "commission/search_space.hpp"
#include "commission/selection.hpp"
#include "commission/signals.hpp"
#include "commission/study.hpp"
#include "commission/tpe.hpp"
#include "commission/trial.hpp"
