#include <iostream>
#include <string>
#include <vector>

#include "hpsg/experiment.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const auto spec = hpsg::parse_config(args);
    const auto rows = hpsg::run(spec, &std::cerr);
    if (spec.out.empty()) {
      std::cout << hpsg::csv_header() << '\n';
      for (const auto& r : rows) std::cout << hpsg::to_csv(r) << '\n';
    }
  } catch (const hpsg::HelpRequested& h) {
    std::cout << h.what();
    return 0;
  } catch (const hpsg::ConfigError& e) {
    std::cerr << "hpsg: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hpsg: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
