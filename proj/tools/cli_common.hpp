#pragma once

#include <exception>
#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include "latentlab/error.hpp"

namespace latentlab::cli {

enum ExitCode : int { kSuccess = 0, kConfigError = 1, kRuntimeError = 2 };

// Parses the command line, then runs `body`. Bad flags and ConfigError map
// to exit code 1, any other failure to 2.
inline int run(CLI::App& app, int argc, char** argv, const std::function<int()>& body) {
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kSuccess : kConfigError;
  }
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace latentlab::cli
