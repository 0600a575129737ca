#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fulldim/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pressure, level-set and carpet dimension computations"};
  app.require_subcommand(1);

  fulldim::cli::RunConfig config;
  std::string output;
  std::string csv;
  std::string threads = "1";
  std::vector<std::string> tolerances;

  for (const auto& name : fulldim::cli::commands()) {
    CLI::App* sub = app.add_subcommand(name, "Run " + name + " on an input file");
    sub->add_option("input", config.input_path, "Input JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output", output, "Write the JSON report here instead of stdout");
    sub->add_option("--csv", csv, "CSV destination for spectrum/trace output");
    sub->add_option("--seed", config.seed, "Seed for randomized searches");
    sub->add_option("--threads", threads, "Worker count or 'auto'");
    sub->add_option("--tol", tolerances, "Tolerance override name=value (repeatable)");
    sub->callback([&config, name] { config.command = name; });
  }

  CLI11_PARSE(app, argc, argv);

  if (!output.empty()) config.output_path = output;
  if (!csv.empty()) config.csv_path = csv;
  if (threads == "auto") {
    config.threads = 0;
  } else {
    try {
      const long n = std::stol(threads);
      if (n < 1) throw std::invalid_argument("");
      config.threads = static_cast<std::size_t>(n);
    } catch (const std::exception&) {
      std::cerr << "--threads: expected a positive integer or 'auto'\n";
      return fulldim::cli::rejected;
    }
  }
  for (const auto& item : tolerances) {
    const auto eq = item.find('=');
    try {
      if (eq == std::string::npos) throw std::invalid_argument("");
      config.tolerances[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      std::cerr << "--tol: expected name=value, got " << item << '\n';
      return fulldim::cli::rejected;
    }
  }
  return fulldim::cli::run(config, std::cout, std::cerr);
}
