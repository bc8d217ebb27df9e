#pragma once

#include <iosfwd>

namespace vm3b::harness {

/// Entry point shared by the vm3b executable and the tests. Returns the
/// process exit code (0 ok, 1 usage/config, 2 solver, 3 threshold).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vm3b::harness
