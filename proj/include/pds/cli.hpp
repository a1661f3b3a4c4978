#pragma once

namespace pds {

/// Command-line entry point. Exit codes: 0 ok, 1 assertion failure, 2 usage
/// error, 3 numerical failure.
int run_cli(int argc, const char* const* argv);

} // namespace pds
