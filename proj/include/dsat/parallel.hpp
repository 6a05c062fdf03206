#pragma once

#include <omp.h>

namespace dsat {

/// Worker count used when a caller passes 0.
inline int omp_default_threads() { return omp_get_max_threads(); }

}  // namespace dsat
