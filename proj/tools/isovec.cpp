#include <string>
#include <vector>

#include "isovec/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return isovec::cli::run(args);
}
