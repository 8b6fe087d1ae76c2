#pragma once

#include "pbs/geometry.hpp"
#include "pbs/tree_graph.hpp"
#include "pbs/shortcut_graph.hpp"
#include "pbs/verify.hpp"
#include "pbs/tree_bundle.hpp"
#include "pbs/decomposition.hpp"
#include "pbs/bca.hpp"
#include "pbs/io.hpp"
#include "pbs/gadget.hpp"
