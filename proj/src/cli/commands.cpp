#include "uscqed/cli/commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "uscqed/parallel.hpp"
#include "uscqed/perturbation.hpp"
#include "uscqed/spectrum.hpp"

namespace uscqed::cli {

namespace {

using nlohmann::json;

void write_metadata(std::ostringstream& os, const std::string& command, const json& settings,
                    const json& derived = json::object()) {
    os << "# command = " << command << '\n';
    for (const auto& [key, value] : settings.items()) os << "# " << key << " = " << value.dump() << '\n';
    for (const auto& [key, value] : derived.items()) os << "# derived." << key << " = " << value.dump() << '\n';
}

void write_row(std::ostringstream& os, const std::vector<double>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << format_number(cells[i]);
    }
    os << '\n';
}

json derived_protocol(const SimResult& r) {
    const auto& p = r.resolved;
    json d;
    d["omega_q_resonance"] = p.resonant.omega_q;
    d["omega_q_detuned"] = p.detuned.omega_q;
    d["g_eff_numeric"] = p.g_eff_numeric;
    d["hold_time"] = p.hold_time;
    d["t_i"] = p.schedule.t_i;
    d["t_f"] = p.schedule.t_f();
    d["t_end"] = p.t_end;
    d["cutoffs_used"] = p.space.mode_cutoffs();
    d["hilbert_dimension"] = p.space.dimension();
    d["working_dimension"] = r.working_dimension;
    d["step"] = r.step;
    d["max_step_deviation"] = r.max_step_deviation;
    d["max_trace_error"] = r.worst.trace_error;
    d["max_hermiticity_error"] = r.worst.hermiticity;
    d["min_eigenvalue"] = r.worst.min_eigenvalue;
    d["upper_shell_population"] = r.upper_shell_population;
    d["final_fidelity"] = r.final_fidelity;
    d["final_phase"] = r.final_phase;
    d["final_qubit_purity"] = r.final_qubit_purity;
    return d;
}

SystemParams geff_params(const GeffJob& job, double g) {
    SystemParams p;
    p.omega = job.omega;
    p.theta = job.theta;
    p.g = {0.0, 0.0, 0.0};
    for (Mode m : target_spec(job.process).active_modes) p.g[static_cast<std::size_t>(m)] = g;
    return p;
}

}  // namespace

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (x == 0.0) return "0";  // folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string cmd_spectrum(const SpectrumJob& job, std::size_t threads) {
    const HilbertSpace space = build_space(job.cutoffs, job.excitation_cap);
    const HamiltonianTerms terms(space, job.params);
    const auto spec = target_spec(job.gap_target);
    const StateVector bare_e = bare_state(space, 0, 0, 0, QubitLevel::e);
    const StateVector bare_photons = bare_state(space, spec.photonic);

    const auto n = static_cast<std::size_t>(job.omega_q_points);
    std::vector<std::vector<double>> rows(n);
    parallel_for(n, threads, [&](std::size_t i) {
        const double w = n == 1 ? job.omega_q_min
                                : job.omega_q_min + (job.omega_q_max - job.omega_q_min) * static_cast<double>(i) /
                                                        static_cast<double>(n - 1);
        const auto decomp = diagonalize(terms.assemble(w, true));
        auto& row = rows[i];
        row.push_back(w);
        for (int k = 0; k < job.levels; ++k) row.push_back(decomp.energies(k) / job.params.omega[0]);
        row.push_back(pair_gap(decomp, bare_e, bare_photons).gap / job.params.omega[0]);
    });

    std::ostringstream os;
    write_metadata(os, "spectrum", describe(job), {{"hilbert_dimension", space.dimension()}});
    os << "omega_q";
    for (int k = 0; k < job.levels; ++k) os << ",E_" << k;
    os << ",gap\n";
    for (const auto& row : rows) write_row(os, row);
    return os.str();
}

std::string cmd_geff(const GeffJob& job, std::size_t threads) {
    const HilbertSpace space = build_space(job.cutoffs, job.excitation_cap);
    const auto spec = target_spec(job.process);
    double resonance_sum = 0.0;
    for (Mode m : spec.active_modes) resonance_sum += job.omega[static_cast<std::size_t>(m)];

    struct Row {
        double numeric = std::nan("");
        double analytic = 0.0;
        double omega_q_star = std::nan("");
        std::string status = "ok";
    };
    std::vector<Row> rows(job.g_values.size());
    parallel_for(rows.size(), threads, [&](std::size_t i) {
        const SystemParams p = geff_params(job, job.g_values[i]);
        Row& row = rows[i];
        row.analytic = job.process == Target::GHZ
                           ? g_eff_ghz_closed(p)
                           : g_eff_bell_closed(p, {spec.active_modes[0], spec.active_modes[1]});
        try {
            const CrossingInfo c = find_avoided_crossing(space, p.with_omega_q(resonance_sum), resonance_sum - 0.1,
                                                         job.half_window,
                                                         {BasisState{{0, 0, 0}, QubitLevel::e}, spec.photonic});
            row.numeric = c.g_eff_numeric;
            row.omega_q_star = c.omega_q_star;
        } catch (const SearchFailure&) {
            row.status = "search_failed";
        }
    });

    std::ostringstream os;
    write_metadata(os, "geff", describe(job));
    os << "g_over_omega_a,geff_numeric,geff_analytic,rel_deviation,omega_q_star,status\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& row = rows[i];
        const double analytic = std::abs(row.analytic);
        const double rel = analytic > 0.0 ? (row.numeric - analytic) / analytic : std::nan("");
        os << format_number(job.g_values[i]) << ',' << format_number(row.numeric) << ',' << format_number(analytic)
           << ',' << format_number(rel) << ',' << format_number(row.omega_q_star) << ',' << row.status << '\n';
    }
    return os.str();
}

std::string cmd_protocol(const ProtocolConfig& config) {
    const SimResult r = run_protocol(config);
    std::ostringstream os;
    write_metadata(os, "protocol", describe(config), derived_protocol(r));
    os << "t,pop_a,pop_b,pop_c,pop_qubit,omega_q_of_t,fidelity\n";
    for (std::size_t k = 0; k < r.t.size(); ++k) {
        write_row(os, {r.t[k], r.pop_a[k], r.pop_b[k], r.pop_c[k], r.pop_qubit[k], r.omega_q[k], r.fidelity[k]});
    }
    return os.str();
}

std::string cmd_sweep(const SweepJob& job, std::size_t threads) {
    const auto entries = decoherence_sweep(job.protocol, job.gammas, threads);
    json derived;
    const auto& first = entries.front().result.resolved;
    derived["omega_q_resonance"] = first.resonant.omega_q;
    derived["g_eff_numeric"] = first.g_eff_numeric;
    derived["hold_time"] = first.hold_time;
    derived["t_end"] = first.t_end;
    json finals = json::array();
    for (const auto& e : entries) finals.push_back({e.gamma, e.result.final_fidelity});
    derived["final_fidelity_by_gamma"] = finals;

    std::ostringstream os;
    write_metadata(os, "sweep", describe(job), derived);
    os << "gamma,t,fidelity\n";
    for (const auto& e : entries) {
        for (std::size_t k = 0; k < e.result.t.size(); ++k) write_row(os, {e.gamma, e.result.t[k], e.result.fidelity[k]});
    }
    return os.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Photonic Bell/GHZ state generation with an ultrastrongly coupled qubit"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_path;
    std::size_t threads = 1;
    for (const char* name : {"spectrum", "geff", "protocol", "sweep"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file (flat keys)");
        sub->add_option("--out", out_path, "CSV output path (default: stdout)");
        sub->add_option("--threads", threads, "worker threads for independent grid points")->check(CLI::PositiveNumber);
    }
    app.get_subcommand("spectrum")->description("eigenvalue scan over the qubit frequency");
    app.get_subcommand("geff")->description("numeric vs closed-form effective coupling");
    app.get_subcommand("protocol")->description("single protocol run: populations and fidelity");
    app.get_subcommand("sweep")->description("final-fidelity traces for a list of decay rates");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return config_error;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    std::string csv;
    try {
        const json j = config_path.empty() ? json::object() : load_json(config_path);
        if (command == "spectrum") {
            csv = cmd_spectrum(parse_spectrum(j), threads);
        } else if (command == "geff") {
            csv = cmd_geff(parse_geff(j), threads);
        } else if (command == "protocol") {
            csv = cmd_protocol(parse_protocol(j));
        } else {
            csv = cmd_sweep(parse_sweep(j), threads);
        }
    } catch (const InvalidArgument& e) {
        err << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const std::runtime_error& e) {
        err << "numerical error: " << e.what() << '\n';
        return numerical_error;
    }

    if (out_path.empty()) {
        out << csv;
        return ok;
    }
    std::ofstream file(out_path, std::ios::binary);
    file << csv;
    file.close();
    if (!file) {
        err << "error: cannot write '" << out_path << "'\n";
        return io_error;
    }
    return ok;
}

}  // namespace uscqed::cli
