#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  return mtlnet::cli::run_command({argv + 1, argv + argc}, std::cout, std::cerr);
}
