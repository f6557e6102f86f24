#ifndef PEXIDER_CLI_HPP
#define PEXIDER_CLI_HPP

#include <string>
#include <vector>

namespace pexider::cli {

/// Runs one pexider-kit invocation; `args` excludes the program name.
/// Exit codes are a stable interface: 0 ok / 1 residual fail / 2 constraint
/// fail / 3 numeric fail / 4 I/O-schema fail / 5 write fail; classify returns
/// its verdict (0 affine, 10 partial, 20 nowhere).
int run(const std::vector<std::string>& args);

}  // namespace pexider::cli

#endif
