#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "uscqed/cli/config.hpp"

namespace uscqed::cli {

// Each command returns the complete CSV text: '#' metadata lines echoing the
// resolved settings (sorted by key), one header row, then data rows.
std::string cmd_spectrum(const SpectrumJob& job, std::size_t threads = 1);
std::string cmd_geff(const GeffJob& job, std::size_t threads = 1);
std::string cmd_protocol(const ProtocolConfig& config);
std::string cmd_sweep(const SweepJob& job, std::size_t threads = 1);

// Fixed-format number rendering used for every CSV cell.
std::string format_number(double x);

enum ExitCode : int { ok = 0, io_error = 1, config_error = 2, numerical_error = 3 };

// Full command-line entry point (subcommand dispatch, file output).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace uscqed::cli
