#pragma once

#include "affsph/errors.hpp"
#include "affsph/multi_index.hpp"
#include "affsph/jet.hpp"
#include "affsph/linalg.hpp"
#include "affsph/smooth_map.hpp"
#include "affsph/grid.hpp"
#include "affsph/hypersurface.hpp"
#include "affsph/paracomplex.hpp"
#include "affsph/families.hpp"
#include "affsph/verify.hpp"
#include "affsph/report_io.hpp"
