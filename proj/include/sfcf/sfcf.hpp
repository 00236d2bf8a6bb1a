#pragma once

#include "sfcf/ci_tests.hpp"
#include "sfcf/column.hpp"
#include "sfcf/csv.hpp"
#include "sfcf/dataflow.hpp"
#include "sfcf/ego_graph.hpp"
#include "sfcf/engine.hpp"
#include "sfcf/error.hpp"
#include "sfcf/evaluation.hpp"
#include "sfcf/selector.hpp"
#include "sfcf/stream_data.hpp"
