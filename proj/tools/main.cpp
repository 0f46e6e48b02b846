#include <iostream>
#include <string>
#include <vector>

#include "adversarl/cli/commands.hpp"

int main(int argc, char** argv) {
  return adversarl::cli::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
