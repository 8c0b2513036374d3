#include <string>
#include <vector>

#include "hyssim/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hyssim::run_cli(args);
}
