// SPDX-License-Identifier: Apache-2.0
//
// stfchan - space-time-frequency non-stationary THz channel simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Command line front end: run, fit, export, validate-config.

#include <stfchan/stfchan.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace
{
    struct CommonOptions
    {
        std::string config;
        std::optional<std::uint64_t> seed;
        std::string out_dir = "out";
        std::optional<std::size_t> realizations;
        std::optional<std::size_t> threads;
    };

    void add_common(CLI::App *cmd, CommonOptions &o, bool with_outputs = true)
    {
        cmd->add_option("--config", o.config, "Configuration file")->required()->check(CLI::ExistingFile);
        if (!with_outputs)
            return;
        cmd->add_option("--seed", o.seed, "Override simulation.master_seed");
        cmd->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
        cmd->add_option("--realizations", o.realizations, "Override simulation.realizations");
        cmd->add_option("--threads", o.threads, "Override simulation.threads (0: all cores)");
    }

    stfchan::SimulationConfig load(const CommonOptions &o)
    {
        auto cfg = stfchan::load_config(o.config);
        if (o.seed)
            cfg.run.master_seed = *o.seed;
        if (o.realizations)
            cfg.run.realizations = *o.realizations;
        if (o.threads)
            cfg.run.threads = *o.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : *o.threads;
        cfg.validate();
        return cfg;
    }

    void log_line(const std::string &s) { std::cerr << s << "\n"; }

    stfchan::AngleKind parse_angle(const std::string &name)
    {
        using stfchan::AngleKind;
        if (name == "sigma_aoa_elevation_deg")
            return AngleKind::aoa_elevation;
        if (name == "sigma_aoa_azimuth_deg")
            return AngleKind::aoa_azimuth;
        if (name == "sigma_aod_elevation_deg")
            return AngleKind::aod_elevation;
        if (name == "sigma_aod_azimuth_deg")
            return AngleKind::aod_azimuth;
        throw stfchan::ConfigError("fit: unsupported parameter '" + name + "'");
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"stfchan: space-time-frequency non-stationary THz channel simulator"};
    app.require_subcommand(1);

    CommonOptions run_o, fit_o, exp_o, val_o;
    auto *run = app.add_subcommand("run", "Simulate realizations and write CIR tensors and statistics");
    add_common(run, run_o);

    auto *fit = app.add_subcommand("fit", "MMSE fit of an intra-cluster angle sigma to a reference CDF");
    add_common(fit, fit_o);
    std::string reference, param = "sigma_aoa_elevation_deg";
    double lo = 0.1, hi = 3.0, step = 0.1;
    fit->add_option("--reference", reference, "Reference CDF (value_deg, probability)")
        ->required()
        ->check(CLI::ExistingFile);
    fit->add_option("--param", param, "Parameter to fit")->capture_default_str();
    fit->add_option("--min", lo, "Grid start [deg]")->capture_default_str();
    fit->add_option("--max", hi, "Grid end [deg]")->capture_default_str();
    fit->add_option("--step", step, "Grid step [deg]")->capture_default_str();

    auto *exp = app.add_subcommand("export", "Write CIR tensors only");
    add_common(exp, exp_o);

    auto *val = app.add_subcommand("validate-config", "Check a configuration file");
    add_common(val, val_o, false);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
            return stfchan::run_experiment(load(run_o), run_o.out_dir, log_line);

        if (*exp)
        {
            auto cfg = load(exp_o);
            cfg.outputs.stats = false;
            cfg.outputs.cir_binary = true;
            if (exp_o.realizations)
                cfg.outputs.cir_realizations = *exp_o.realizations;
            return stfchan::run_experiment(cfg, exp_o.out_dir, log_line);
        }

        if (*fit)
        {
            const auto cfg = load(fit_o);
            const auto kind = parse_angle(param);
            stfchan::ReferenceCdf ref{stfchan::read_cdf_csv(reference), reference};
            const auto res = stfchan::mmse_fit({stfchan::linear_grid(lo, hi, step)},
                                               stfchan::make_sigma_fit_simulator(cfg, kind), ref, cfg.run.threads);
            std::filesystem::create_directories(fit_o.out_dir);
            stfchan::CsvTable t;
            t.header = {param, "mse", "ks"};
            for (const auto &p : res.evaluated)
                t.add({p.params[0], p.distance.mse, p.distance.ks});
            stfchan::write_csv(std::filesystem::path(fit_o.out_dir) / "fit_grid.csv", t);
            std::cout << param << " = " << stfchan::fmt(res.best[0]) << " (mse " << stfchan::fmt(res.distance.mse)
                      << ", ks " << stfchan::fmt(res.distance.ks) << ")\n";
            return 0;
        }

        if (*val)
        {
            const auto cfg = stfchan::load_config(val_o.config);
            std::cout << "config OK: " << cfg.model.tx_array.size() << " Tx x " << cfg.model.rx_array.size()
                      << " Rx elements, " << cfg.model.band.n_sub << " sub-bands, " << cfg.model.time.n_snapshots
                      << " snapshots\n";
            return 0;
        }
    }
    catch (const stfchan::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    catch (const stfchan::IoError &e)
    {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
