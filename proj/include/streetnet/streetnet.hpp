#pragma once

#include "streetnet/config.hpp"
#include "streetnet/errors.hpp"
#include "streetnet/extract.hpp"
#include "streetnet/geodata.hpp"
#include "streetnet/geojson.hpp"
#include "streetnet/graph.hpp"
#include "streetnet/io.hpp"
#include "streetnet/metrics.hpp"
#include "streetnet/parallel.hpp"
#include "streetnet/plot.hpp"
#include "streetnet/raster.hpp"
