#pragma once

#include "barcode_plot.hpp"
#include "binary_io.hpp"
#include "clique_engine.hpp"
#include "core_types.hpp"
#include "edge_pipeline.hpp"
#include "errors.hpp"
#include "oracle.hpp"
#include "persistence_engine.hpp"
#include "selfcheck.hpp"
#include "session.hpp"
#include "state_store.hpp"
