#pragma once

#include "magsa/assembly.hpp"
#include "magsa/check_result.hpp"
#include "magsa/checks.hpp"
#include "magsa/diagnostics.hpp"
#include "magsa/families.hpp"
#include "magsa/fields.hpp"
#include "magsa/graph.hpp"
#include "magsa/graph_io.hpp"
#include "magsa/harmonic.hpp"
#include "magsa/metric.hpp"
#include "magsa/operators.hpp"
#include "magsa/report.hpp"
#include "magsa/spectrum.hpp"
#include "magsa/suite.hpp"
