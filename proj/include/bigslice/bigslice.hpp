#pragma once
// bigslice.hpp - Umbrella header.

#include "bigslice/benchkit.hpp"
#include "bigslice/divengine.hpp"
#include "bigslice/mulengine.hpp"
#include "bigslice/natural.hpp"
#include "bigslice/shinv.hpp"
#include "bigslice/sliceprod.hpp"
#include "bigslice/thresholds.hpp"
#include "bigslice/workspace.hpp"
