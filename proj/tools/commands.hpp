#pragma once

#include "warpheat/config.hpp"

#include <string>

namespace warpheat::cli {

// Exit statuses shared by every command.
enum Exit : int { ok = 0, check_failed = 1, no_convergence = 2, io_or_config = 3 };

int cmd_params(const RunConfig& cfg, const std::string& out);
int cmd_certify(const RunConfig& cfg, const std::string& out);
int cmd_solve(const RunConfig& cfg, const std::string& out);
int cmd_spectral(const RunConfig& cfg, const std::string& out);
int cmd_blowdown(const RunConfig& cfg, const std::string& out);
int cmd_demo_oscillation(const RunConfig& cfg, const std::string& out);

} // namespace warpheat::cli
