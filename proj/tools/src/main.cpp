#include <iostream>
#include <string>
#include <vector>

#include "shum_app/app.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return shum::app::run(args, std::cout, std::cerr);
}
