#include <iostream>
#include <string>
#include <vector>

#include "dispatch.hpp"

int main(int argc, char** argv) {
  return porehom::dispatch(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
