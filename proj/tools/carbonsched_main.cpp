#include <iostream>
#include <string>
#include <vector>

#include "carbonsched/cli.hpp"

int main(int argc, char** argv) {
  return carbonsched::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
