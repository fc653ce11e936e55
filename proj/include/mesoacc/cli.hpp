#pragma once

#include <string>
#include <vector>

namespace mesoacc {

// Entry point behind the mesoacc binary, callable from tests.
// Exit codes: 0 success, 1 usage/parse error, 2 collision, 3 property failure.
int cli_main(const std::vector<std::string>& args);

}  // namespace mesoacc
