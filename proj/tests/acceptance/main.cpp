#include <iostream>

#include <clarklab/acceptance.hpp>

int main() {
  bool ok = true;
  clarklab::run_acceptance({}, [&](const clarklab::CriterionResult& r) {
    std::cout << clarklab::format(r) << std::endl;
    ok = ok && r.pass;
  });
  return ok ? 0 : 1;
}
