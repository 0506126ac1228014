#include <iostream>

#include "dare/cli.hpp"

int main(int argc, char** argv) {
  const auto parsed = dare::cli::parse_args(argc, argv, std::cout, std::cerr);
  if (!parsed.config) return parsed.exit_code;
  return dare::cli::run(*parsed.config, std::cout, std::cerr);
}
