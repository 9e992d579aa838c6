#pragma once

// Umbrella header pulling in the whole library.

#include "navmine/core.hpp"      // IWYU pragma: export
#include "navmine/errors.hpp"    // IWYU pragma: export
#include "navmine/ingest.hpp"    // IWYU pragma: export
#include "navmine/model.hpp"     // IWYU pragma: export
#include "navmine/detect.hpp"    // IWYU pragma: export
#include "navmine/simulate.hpp"  // IWYU pragma: export
#include "navmine/evaluate.hpp"  // IWYU pragma: export
#include "navmine/config.hpp"    // IWYU pragma: export
#include "navmine/report.hpp"    // IWYU pragma: export
#include "navmine/dot.hpp"       // IWYU pragma: export
