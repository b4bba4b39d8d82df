#pragma once

#include "stylized/calendar.hpp"
#include "stylized/crosssection.hpp"
#include "stylized/dependence.hpp"
#include "stylized/dexarb.hpp"
#include "stylized/distribution.hpp"
#include "stylized/error.hpp"
#include "stylized/hash.hpp"
#include "stylized/ingestion.hpp"
#include "stylized/report.hpp"
#include "stylized/stats.hpp"
#include "stylized/timeseries.hpp"
