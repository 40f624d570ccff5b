#include <iostream>
#include <string>
#include <vector>

#include "evobo/cli.hpp"

int main(int argc, char** argv) {
  return evobo::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
