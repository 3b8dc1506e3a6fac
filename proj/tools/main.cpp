#include <iostream>

#include "wzsentinel/pipeline.hpp"

int main(int argc, char** argv) {
  return wz::run_cli(argc, argv, std::cout, std::cerr);
}
