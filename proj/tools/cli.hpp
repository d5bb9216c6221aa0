#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace weaktomo::cli {

enum ExitCode { kOk = 0, kRuntimeError = 1, kConfigError = 2, kPartial = 3 };

// args excludes the program name. Reports go to `out` (or --out), JSON error
// objects to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace weaktomo::cli
