#pragma once

#include <torsionlab/checks.hpp>

namespace tlab::testing {

using tlab::random_state;
using tlab::rel_block_error;

}  // namespace tlab::testing
