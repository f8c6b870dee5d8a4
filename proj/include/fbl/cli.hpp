#pragma once

#include <ostream>

namespace fbl {

/// Batch front end. Writes the JSON run report to `out` and a human summary to
/// `err`. Returns 0 on pass, 1 on a property failure, 2 on a usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fbl
