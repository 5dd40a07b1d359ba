#include <iostream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "ttqubo/cli.hpp"

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("ttqubo"));
  spdlog::set_level(spdlog::level::warn);
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "-v" || a == "--verbose")
      spdlog::set_level(spdlog::level::info);
    else
      args.push_back(a);
  }
  return ttqubo::cli::run(args, std::cout, std::cerr);
}
