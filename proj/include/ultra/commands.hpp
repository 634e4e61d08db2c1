#pragma once

#include "ultra/config.hpp"
#include "ultra/report.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ultra {

/// The workspace lacks something a command needs (exit code 3).
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

const std::vector<std::string>& command_names();

/// Runs one command ("all" runs every command the workspace supports).
/// Matrices are written to export_dir when given. Throws InputError.
Report run_command(const std::string& command, const Workspace& ws,
                   const std::optional<std::string>& export_dir = std::nullopt);

} // namespace ultra
