#include <string>
#include <vector>

#include "cli/cli.hpp"

int main(int argc, char** argv) {
  return mapcore::cli::run(std::vector<std::string>(argv, argv + argc));
}
