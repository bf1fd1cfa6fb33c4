#pragma once

#include "polylay/bundle.hpp"
#include "polylay/energy.hpp"
#include "polylay/geometry.hpp"
#include "polylay/hypergraph.hpp"
#include "polylay/init.hpp"
#include "polylay/layout_state.hpp"
#include "polylay/lbfgs.hpp"
#include "polylay/optimizer.hpp"
#include "polylay/svg.hpp"
#include "polylay/weights.hpp"
