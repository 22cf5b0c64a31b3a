#pragma once

#include <iosfwd>
#include <string_view>

namespace simple {

inline constexpr std::string_view kVersion = "0.1.0";

// Exit codes: 0 success, 1 usage, 2 data, 3 numerical.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace simple
