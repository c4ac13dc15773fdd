#include <cstdlib>
#include <iostream>
#include <string>

#include "criteria.hpp"

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  bool ok = true;
  for (const auto& c : conigap::acceptance::criteria()) {
    if (only && c.id != only) continue;
    auto r = conigap::acceptance::run(c);
    std::cout << r.line() << std::endl;
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}
