// SPDX-License-Identifier: Apache-2.0
// skychan: satellite-to-ground channel simulator, command-line front end

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include "CLI11.hpp"

#include "skychan.h"

namespace {

int exit_code(int status) {
    switch (status) {
    case SKYCHAN_OK: return 0;
    case SKYCHAN_ERR_CONFIG: return 2;
    case SKYCHAN_ERR_PARTIAL: return 3;
    default: return 1;
    }
}

int finish(skychan_sim* sim, int status) {
    if (status != SKYCHAN_OK)
        std::fprintf(stderr, "skychan: %s\n", skychan_last_error(sim));
    return exit_code(status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"satellite-to-ground channel simulator"};
    app.set_version_flag("--version", skychan_version());
    app.require_subcommand(1);

    std::string config_path, out_dir, dump_dir, manifest_path;
    std::uint64_t seed = 0;
    double rate_hz = -1.0;
    double bandwidth_hz = 0.0, window_s = 0.0;
    int nfft = 0;
    bool csv_dump = false;

    CLI::App* sim_cmd = app.add_subcommand("simulate", "run a scenario and write channel dumps");
    sim_cmd->add_option("-c,--config", config_path, "scenario config file")
        ->required()
        ->check(CLI::ExistingFile);
    sim_cmd->add_option("-o,--out", out_dir, "output directory")->required();
    CLI::Option* seed_opt = sim_cmd->add_option("--seed", seed, "override the master seed");
    sim_cmd->add_option("--rate", rate_hz,
                        "override the channel update rate [Hz] (0 = derive minimum)");

    CLI::App* ana_cmd = app.add_subcommand("analyze", "analyze the dumps of a finished run");
    ana_cmd->add_option("dir", dump_dir, "directory holding manifest.json / *.skch dumps")
        ->required()
        ->check(CLI::ExistingDirectory);
    ana_cmd->add_option("-o,--out", out_dir, "output directory")->required();
    ana_cmd->add_option("--bandwidth", bandwidth_hz, "analysis bandwidth [Hz]");
    ana_cmd->add_option("--nfft", nfft, "Doppler FFT size (power of two)");
    ana_cmd->add_option("--window", window_s, "Doppler window length [s]");
    ana_cmd->add_flag("--csv", csv_dump, "also write each tensor as CSV");

    CLI::App* rep_cmd = app.add_subcommand("report", "print a run summary to stdout");
    rep_cmd->add_option("manifest", manifest_path, "manifest.json of a finished run")
        ->required()
        ->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    std::unique_ptr<skychan_sim, decltype(&skychan_destroy)> sim(skychan_create(),
                                                                 &skychan_destroy);
    if (!sim) {
        std::fprintf(stderr, "skychan: out of memory\n");
        return 1;
    }

    if (sim_cmd->parsed()) {
        int st = skychan_load_config(sim.get(), config_path.c_str());
        if (st != SKYCHAN_OK)
            return finish(sim.get(), st);
        if (seed_opt->count() > 0 &&
            (st = skychan_set_seed(sim.get(), seed)) != SKYCHAN_OK)
            return finish(sim.get(), st);
        if (rate_hz >= 0.0 && (st = skychan_set_rate(sim.get(), rate_hz)) != SKYCHAN_OK)
            return finish(sim.get(), st);
        st = skychan_simulate(sim.get(), out_dir.c_str());
        if (st == SKYCHAN_OK)
            std::printf("wrote %s/manifest.json\n", out_dir.c_str());
        return finish(sim.get(), st);
    }

    if (ana_cmd->parsed()) {
        int st = skychan_analyze(sim.get(), dump_dir.c_str(), out_dir.c_str(), bandwidth_hz,
                                 nfft, window_s, csv_dump ? 1 : 0);
        if (st == SKYCHAN_OK || st == SKYCHAN_ERR_PARTIAL)
            std::printf("wrote analysis under %s\n", out_dir.c_str());
        return finish(sim.get(), st);
    }

    // report
    char* text = nullptr;
    int st = skychan_report_alloc(sim.get(), manifest_path.c_str(), &text);
    if (st == SKYCHAN_OK) {
        std::fputs(text, stdout);
        skychan_string_free(text);
    }
    return finish(sim.get(), st);
}
