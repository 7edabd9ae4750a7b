// gupred: batch front end for deformed-bracket scenarios.
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gupred/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Deformed symplectic structures: verification, reduction and flows"};
  app.name("gupred");

  std::string command;
  std::string file;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> grid;
  std::optional<std::string> out;

  app.add_option("command", command, "verify, reduce or evolve")
      ->required()
      ->check(CLI::IsMember({"verify", "reduce", "evolve"}));
  app.add_option("file", file, "scenario file")->required();
  app.add_option("--samples", samples, "sample count for verify (default 200)");
  app.add_option("--seed", seed, "seed override for sampled checks");
  app.add_option("--grid", grid, "reduce grid, e.g. rho=0:2:9 or 1:1:1,0:1:3");
  app.add_option("--out", out, "write the report or CSV to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return gupred::cli::kExitConfig;
  }

  gupred::cli::RunOptions opt{samples, seed, grid, out};
  return gupred::cli::run_command(command, file, opt, std::cout, std::cerr);
}
