#include <iostream>

#include <CLI11.hpp>

#include "memsq/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"memsq: steady states, bounds and quenching runs for the nonlocal MEMS problem"};
  std::string config;
  memsq::RunOptions options;
  std::string out = options.out.string();
  app.add_option("config", config, "key = value run configuration")->required();
  app.add_option("--out", out, "output directory");
  app.add_option("--workers", options.workers, "concurrent sweep sub-runs (0 = hardware threads)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  options.out = out;
  return memsq::run(config, options, std::cerr);
}
