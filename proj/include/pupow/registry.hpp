#pragma once

#include "pupow/problem.hpp"

namespace pupow {

/// All built-in problem types: the fallback puzzle (tag 0), the function
/// family (1-4) and the split-key vanity types (5-6).
ProblemRegistry make_default_registry();

}  // namespace pupow
