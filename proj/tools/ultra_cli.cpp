#include "ultra/commands.hpp"
#include "ultra/config.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Exact checks for relative ultragraphs and Markov interval maps"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all");

  std::string config;
  std::optional<int> depth;
  std::optional<ultra::Index> horizon;
  std::optional<int> cycles;
  std::string format = "text";
  std::optional<std::string> export_dir;

  app.add_option("--config", config, "configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--depth", depth, "orbit depth D")->check(CLI::PositiveNumber);
  app.add_option("--horizon", horizon, "index horizon N")->check(CLI::PositiveNumber);
  app.add_option("--cycles", cycles, "maximum cycle length")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"text", "records"}));
  app.add_option("--export-matrices", export_dir, "directory for coordinate-list matrices");

  std::string command;
  for (const std::string& name : ultra::command_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " checks");
    sub->fallthrough();
    sub->callback([&command, name] { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    ultra::Workspace ws = ultra::load_config(config);
    if (depth)
      ws.run.depth = *depth;
    if (horizon)
      ws.run.horizon = *horizon;
    if (cycles)
      ws.run.cycles.maxlen = *cycles;
    ultra::Report report = ultra::run_command(command, ws, export_dir);
    std::cout << (format == "records" ? report.records_jsonl() : report.text());
    return ultra::exit_code(report);
  } catch (const ultra::ConfigError& e) {
    std::cerr << config << ":" << e.what() << "\n";
  } catch (const ultra::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 3;
}
