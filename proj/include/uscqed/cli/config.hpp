#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uscqed/errors.hpp"
#include "uscqed/hamiltonian.hpp"
#include "uscqed/protocol.hpp"

namespace uscqed::cli {

// Bad or unreadable configuration; maps to exit status 2.
class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

struct SpectrumJob {
    SystemParams params;  // omega_q is replaced by the grid values
    std::array<int, kNumModes> cutoffs{4, 4, 4};
    std::optional<int> excitation_cap;
    double omega_q_min = 2.0;
    double omega_q_max = 4.5;
    int omega_q_points = 501;
    int levels = 12;
    Target gap_target = Target::B110;  // bare pair whose splitting fills the gap column
};

struct GeffJob {
    Target process = Target::B110;
    std::vector<double> g_values{0.02, 0.05, 0.1, 0.15, 0.2};
    double theta = 0.5235987755982988;  // pi/6; must be 0 for GHZ
    std::array<double, kNumModes> omega{1.0, 1.5, 1.75};
    std::array<int, kNumModes> cutoffs{4, 4, 4};
    std::optional<int> excitation_cap;
    double half_window = 0.2;
};

struct SweepJob {
    ProtocolConfig protocol;
    std::vector<double> gammas{1e-5, 1e-4, 1e-3, 1e-2};
};

nlohmann::json load_json(const std::string& path);  // throws ConfigError

// Each parser rejects unknown keys and validates every field before returning.
SpectrumJob parse_spectrum(const nlohmann::json& j);
GeffJob parse_geff(const nlohmann::json& j);
ProtocolConfig parse_protocol(const nlohmann::json& j);
SweepJob parse_sweep(const nlohmann::json& j);

// Fully resolved settings, keyed like the config file (defaults filled in).
nlohmann::json describe(const SpectrumJob& job);
nlohmann::json describe(const GeffJob& job);
nlohmann::json describe(const ProtocolConfig& config);
nlohmann::json describe(const SweepJob& job);

}  // namespace uscqed::cli
