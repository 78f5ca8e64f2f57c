#include <algorithm>
#include <iostream>

#include "funcrelu/verify.hpp"

int main() {
  const auto results = funcrelu::verify::run_all(std::cout);
  const auto passed = std::count_if(results.begin(), results.end(),
                                    [](const auto& r) { return r.passed; });
  std::cout << passed << "/" << results.size() << " acceptance criteria passed\n";
  return passed == static_cast<long>(results.size()) ? 0 : 1;
}
