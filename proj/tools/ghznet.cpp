// ghznet: run GHZ-preparation protocols over network specification files.
//
//   ghznet check  SPEC          connectivity verdict (exit 0 / 2)
//   ghznet tree   SPEC          breadth-first spanning EPR tree
//   ghznet mst    SPEC          minimum-weight spanning EPR tree
//   ghznet ghz3   SPEC          three-agent symmetric circuit
//   ghznet weave  SPEC          spanning-tree protocol
//   ghznet fuse   SPEC          hypergraph fusion protocol

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "ghznet/cli.hpp"

namespace {

struct Invocation {
  std::string spec_path;
  std::string report_path;
  ghznet::cli::Flags flags;
};

void add_common_options(CLI::App* sub, Invocation& inv) {
  sub->add_option("spec", inv.spec_path, "Network specification file")->required();
  sub->add_option("--seed", inv.flags.seed, "Seed for sampled measurement outcomes")
      ->default_val(0);
  sub->add_option("--branches", inv.flags.branches, "all | sample:<count>")->default_val("all");
  sub->add_option("--step2", inv.flags.step2, "symmetric | zeilinger")->default_val("symmetric");
  sub->add_option("--report", inv.report_path, "Write the JSON report here instead of stdout");
  sub->add_flag("--verbose", inv.flags.verbose, "List the transcript on stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GHZ-state preparation over networks of shared entanglement"};
  app.require_subcommand(1);
  Invocation inv;
  for (const char* name : {"check", "tree", "mst", "ghz3", "weave", "fuse"}) {
    add_common_options(app.add_subcommand(name), inv);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ghznet::cli::kExitFailure;
  }

  std::ifstream in(inv.spec_path, std::ios::binary);
  if (!in) {
    std::cerr << "ghznet: cannot read " << inv.spec_path << "\n";
    return ghznet::cli::kExitFailure;
  }
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

  const std::string subcommand = app.get_subcommands().front()->get_name();
  const auto result = ghznet::cli::run(subcommand, text, inv.flags);

  if (inv.report_path.empty()) {
    std::cout << result.report;
  } else {
    std::ofstream out(inv.report_path, std::ios::binary);
    if (!out) {
      std::cerr << "ghznet: cannot write " << inv.report_path << "\n";
      return ghznet::cli::kExitFailure;
    }
    out << result.report;
    std::cout << result.summary << "\n";
  }
  if (result.exit_code != ghznet::cli::kExitOk) std::cerr << "ghznet: " << result.summary << "\n";
  if (inv.flags.verbose) std::cerr << result.detail;
  return result.exit_code;
}
