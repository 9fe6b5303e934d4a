#ifndef GTQW_GTQW_HPP
#define GTQW_GTQW_HPP

#include "gtqw/analysis.hpp"
#include "gtqw/error.hpp"
#include "gtqw/graph_json.hpp"
#include "gtqw/graphs.hpp"
#include "gtqw/linalg.hpp"
#include "gtqw/photonics.hpp"
#include "gtqw/walks.hpp"

#endif
