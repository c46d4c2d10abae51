#pragma once

#include <string>
#include <vector>

namespace scatlab::cli {

enum ExitCode { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

// args excludes the program name. Messages go to stderr.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

std::string sha256_hex(const std::string& bytes);

}  // namespace scatlab::cli
