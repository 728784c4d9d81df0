#pragma once

#include <iosfwd>

namespace cso {

// Exit codes: 0 success, 1 configuration or usage error, 2 runtime failure.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int cli_main(int argc, const char* const* argv);

}  // namespace cso
