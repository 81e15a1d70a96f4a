// Pipeline driver: predict a filtered-source state, simulate tomography
// counts, reconstruct a density matrix, and analyze entanglement measures.
// Exit codes: 0 success, 2 bad configuration/parameters, 3 unreadable or
// invalid input files, 1 unexpected internal failure.
#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "biphoton/entanglement.hpp"
#include "biphoton/io.hpp"
#include "biphoton/measurement.hpp"
#include "biphoton/qstate.hpp"
#include "biphoton/spdc.hpp"
#include "biphoton/tomography.hpp"

namespace fs = std::filesystem;
using namespace biphoton;

namespace {

struct CommonOptions {
    std::string out_dir = ".";
    std::vector<double> angles;  // empty or a1,a2,b1,b2
};

struct ScenarioOptions {
    std::string scenario_file;
    std::optional<double> bandwidth_nm;
    std::optional<double> sigma_t_fs;
    std::optional<double> tau_fs;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--out", opts.out_dir, "Output directory (created if missing)");
    cmd->add_option("--angles", opts.angles,
                    "CHSH angles a1,a2,b1,b2 in degrees (default 0,45,22.5,67.5)")
        ->delimiter(',')
        ->expected(4);
}

void add_scenario(CLI::App* cmd, ScenarioOptions& opts) {
    cmd->add_option("--scenario", opts.scenario_file, "Scenario config JSON");
    cmd->add_option("--bandwidth", opts.bandwidth_nm, "Filter FWHM bandwidth in nm (catalog lookup)");
    cmd->add_option("--sigma-t", opts.sigma_t_fs, "Explicit wave-packet RMS width in fs");
    cmd->add_option("--tau", opts.tau_fs, "Inter-packet delay in fs (default 100)");
}

AngleSet chosen_angles(const CommonOptions& opts) {
    if (opts.angles.empty()) {
        return default_chsh_angles();
    }
    return AngleSet(opts.angles[0], opts.angles[1], opts.angles[2], opts.angles[3]);
}

std::string out_path(const CommonOptions& opts, const char* name) {
    fs::create_directories(opts.out_dir);
    return (fs::path(opts.out_dir) / name).string();
}

FilterScenario build_scenario(const ScenarioOptions& opts) {
    FilterScenario s;
    bool have_source = false;
    if (!opts.scenario_file.empty()) {
        s = read_scenario(opts.scenario_file);
        have_source = true;
    }
    if (opts.bandwidth_nm) {
        s.bandwidth_nm = *opts.bandwidth_nm;
        have_source = true;
    }
    if (opts.sigma_t_fs) {
        s.sigma_t_fs = *opts.sigma_t_fs;
        have_source = true;
    }
    if (opts.tau_fs) {
        s.tau_fs = *opts.tau_fs;
    }
    if (!have_source) {
        throw std::invalid_argument("need --bandwidth, --sigma-t or --scenario");
    }
    return s;
}

// File-derived failures become IoError so the caller maps them to exit 3.
DensityMatrix load_state(const std::string& path) {
    const Eigen::Matrix4cd m = read_density_matrix(path);
    try {
        return validate(m);
    } catch (const std::exception& e) {
        throw IoError(path + ": " + e.what());
    }
}

void run_predict(const ScenarioOptions& scenario_opts, const CommonOptions& common) {
    const FilterScenario scenario = build_scenario(scenario_opts);
    PredictionResult result = predict(scenario);
    if (!common.angles.empty()) {
        result.report = report(result.rho, chosen_angles(common));
    }

    CoherenceSummary summary{result.coherence.value, result.sigma_t_fs, scenario.tau_fs, {}};
    if (scenario.bandwidth_nm > 0.0) {
        summary.bandwidth_nm = scenario.bandwidth_nm;
    }
    write_coherence(out_path(common, "coherence.json"), summary);
    write_density_matrix(out_path(common, "rho.json"), result.rho.matrix());
    write_entanglement_report(out_path(common, "report.json"), result.report);
    std::cout << "C = " << result.coherence.magnitude()
              << ", concurrence = " << result.report.concurrence << "\n";
}

void run_simulate(const ScenarioOptions& scenario_opts, const CommonOptions& common,
                  const std::string& rho_file, double exposure, std::uint64_t seed) {
    if (!(exposure > 0.0)) {
        throw std::invalid_argument("--exposure must be positive");
    }
    std::optional<DensityMatrix> state;
    if (!rho_file.empty()) {
        state = load_state(rho_file);
    } else {
        state = predict(build_scenario(scenario_opts)).rho;
    }
    const auto records = simulate_counts(*state, standard_tomography_set(), exposure, seed);
    write_counts(out_path(common, "counts.json"), records);
    std::cout << "wrote 16 records at exposure " << exposure << "\n";
}

void run_reconstruct(const CommonOptions& common, const std::string& counts_file,
                     std::uint64_t seed) {
    const auto records = read_counts(counts_file);
    try {
        const RawReconstruction raw = linear_invert(records);
        const MleResult mle = mle_reconstruct(records, raw, seed);
        write_density_matrix(out_path(common, "rho_raw.json"), raw.entries);
        write_density_matrix(out_path(common, "rho_mle.json"), mle.rho.matrix());
        write_reconstruction_summary(
            out_path(common, "reconstruction.json"),
            {mle.objective, mle.iterations, mle.converged, raw.min_eigenvalue});
        std::cout << "raw min eigenvalue " << raw.min_eigenvalue
                  << (raw.legitimate ? " (legitimate)" : " (illegitimate)")
                  << ", objective " << mle.objective << "\n";
    } catch (const DegenerateTomography& e) {
        throw IoError(counts_file + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw IoError(counts_file + ": " + e.what());
    }
}

void run_analyze(const CommonOptions& common, const std::string& rho_file) {
    const DensityMatrix rho = load_state(rho_file);
    write_entanglement_report(out_path(common, "report.json"),
                              report(rho, chosen_angles(common)));
    write_fringes(out_path(common, "fringes.csv"), rho);
    std::cout << "wrote report.json and fringes.csv\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bi-photon spectral-filtering pipeline"};
    app.require_subcommand(1);

    CommonOptions predict_common, simulate_common, reconstruct_common, analyze_common;
    ScenarioOptions predict_scenario, simulate_scenario;
    std::string simulate_rho, reconstruct_counts, analyze_rho;
    double simulate_exposure = 0.0;
    std::uint64_t simulate_seed = 0;
    std::uint64_t reconstruct_seed = 0;

    CLI::App* cmd_predict =
        app.add_subcommand("predict", "Predict the filtered two-photon state");
    add_scenario(cmd_predict, predict_scenario);
    add_common(cmd_predict, predict_common);

    CLI::App* cmd_simulate =
        app.add_subcommand("simulate", "Simulate tomography coincidence counts");
    add_scenario(cmd_simulate, simulate_scenario);
    add_common(cmd_simulate, simulate_common);
    cmd_simulate->add_option("--rho", simulate_rho, "Density-matrix JSON to sample from");
    cmd_simulate->add_option("--exposure", simulate_exposure, "Expected pairs per setting")
        ->required();
    cmd_simulate->add_option("--seed", simulate_seed, "RNG seed")->required();

    CLI::App* cmd_reconstruct =
        app.add_subcommand("reconstruct", "Reconstruct a density matrix from counts");
    add_common(cmd_reconstruct, reconstruct_common);
    cmd_reconstruct->add_option("--counts", reconstruct_counts, "Counts JSON file")->required();
    cmd_reconstruct->add_option("--seed", reconstruct_seed, "Optimizer restart seed");

    CLI::App* cmd_analyze =
        app.add_subcommand("analyze", "Entanglement report and fringes for a state");
    add_common(cmd_analyze, analyze_common);
    cmd_analyze->add_option("--rho", analyze_rho, "Density-matrix JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*cmd_predict) {
            run_predict(predict_scenario, predict_common);
        } else if (*cmd_simulate) {
            run_simulate(simulate_scenario, simulate_common, simulate_rho,
                         simulate_exposure, simulate_seed);
        } else if (*cmd_reconstruct) {
            run_reconstruct(reconstruct_common, reconstruct_counts, reconstruct_seed);
        } else if (*cmd_analyze) {
            run_analyze(analyze_common, analyze_rho);
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
