// Command-line front end for the delay-and-sum beamforming toolkit.
//
// Subcommands: synth, beamform, compare, heatmap, experiment, ingest,
// aliasing-check. Exit codes: 0 success, 1 validation error, 2 runtime or
// parse error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsbeam/dsbeam.hpp"

namespace fs = std::filesystem;
using namespace dsbeam;

namespace {

struct GeometryFlags {
    std::size_t elements = 2;
    double spacing = 0.084;
    double speed_of_sound = kDefaultSpeedOfSound;
    std::string geometry_json;

    void attach(CLI::App* cmd) {
        cmd->add_option("--elements,-n", elements, "element count (default 2)");
        cmd->add_option("--spacing,-d", spacing, "inter-element spacing in meters (default 0.084)");
        cmd->add_option("--speed-of-sound,-c", speed_of_sound, "speed of sound in m/s (default 343)");
        cmd->add_option("--geometry", geometry_json, "geometry JSON file (overrides the flags)");
    }

    ArrayGeometry build() const {
        if (!geometry_json.empty()) {
            std::ifstream in(geometry_json);
            if (!in) fail(errc::parse_error, "cannot open " + geometry_json);
            nlohmann::json j;
            in >> j;
            return ArrayGeometry::from_json(j);
        }
        return uniform_linear(elements, spacing, speed_of_sound);
    }
};

Reflection parse_reflection(const std::string& text) {
    Reflection r;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &r.azimuth_deg, &r.gain, &r.extra_delay_s) < 2)
        fail(errc::config_validation,
             "reflection must be azimuth:gain[:extra_delay_s], got '" + text + "'");
    return r;
}

void write_text(const fs::path& p, const std::string& content) {
    detail::write_text_file(p, content);
}

ExperimentConfig load_config(const std::string& path, bool* had_seeds = nullptr) {
    if (path.empty()) {
        if (had_seeds) *had_seeds = false;
        return ExperimentConfig::defaults();
    }
    std::ifstream in(path);
    if (!in) fail(errc::parse_error, "cannot open config " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(errc::parse_error, std::string("config is not valid JSON: ") + e.what());
    }
    if (had_seeds) *had_seeds = j.contains("seeds");
    return ExperimentConfig::from_json(j);
}

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case errc::config_validation:
        case errc::invalid_geometry:
        case errc::invalid_frequency:
        case errc::out_of_range:
        case errc::aliased_synthesis:
            return 1;
        default:
            return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-domain delay-and-sum beamforming toolkit"};
    app.require_subcommand(1);

    // ---- synth ----------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "synthesize a multichannel plane-wave recording");
    GeometryFlags synth_geo;
    synth_geo.attach(synth);
    std::string waveform = "tone";
    double freq = 1650.0, f0 = 500.0, f1 = 3000.0, duration = 1.0, amplitude = 0.5;
    double azimuth = 0.0, rate = 96000.0, noise_rms = 0.0;
    std::vector<std::string> reflections;
    std::uint64_t seed = 0;
    std::string out_dir;
    synth->add_option("--waveform", waveform, "tone | sweep")
        ->check(CLI::IsMember({"tone", "sweep"}));
    synth->add_option("--freq,-f", freq, "tone frequency in Hz");
    synth->add_option("--f0", f0, "sweep start frequency in Hz");
    synth->add_option("--f1", f1, "sweep end frequency in Hz");
    synth->add_option("--duration,-T", duration, "duration in seconds");
    synth->add_option("--amplitude,-a", amplitude, "amplitude in (0, 1]");
    synth->add_option("--azimuth", azimuth, "source azimuth in degrees from broadside");
    synth->add_option("--rate,-r", rate, "sample rate in Hz (default 96000)");
    synth->add_option("--noise-rms", noise_rms, "additive white noise RMS");
    synth->add_option("--reflection", reflections,
                      "reflection as azimuth:gain[:extra_delay_s]; repeatable");
    synth->add_option("--seed", seed, "noise seed")->required();
    synth->add_option("--out-dir", out_dir, "output directory")->required();
    synth->callback([&] {
        const ArrayGeometry g = synth_geo.build();
        SourceSpec src;
        src.azimuth_deg = azimuth;
        src.waveform = waveform == "tone" ? Waveform{Tone{freq}} : Waveform{LinearSweep{f0, f1}};
        src.amplitude = amplitude;
        src.duration_s = duration;
        DegradationSpec deg;
        deg.noise_rms = noise_rms;
        for (const auto& r : reflections) deg.reflections.push_back(parse_reflection(r));

        const MultichannelRecording rec = synthesize(src, g, rate, deg, seed);
        fs::create_directories(out_dir);
        const WavSpec spec{static_cast<std::uint32_t>(rate), 16,
                           static_cast<std::uint16_t>(rec.channel_count())};
        const std::size_t clipped = write_wav_file(fs::path(out_dir) / "synth.wav", spec, rec);
        write_text(fs::path(out_dir) / "geometry.json", g.to_json().dump(2) + "\n");
        std::cout << "wrote " << (fs::path(out_dir) / "synth.wav").string() << " ("
                  << rec.channel_count() << " ch, " << rec.frames() << " frames";
        if (clipped) std::cout << ", " << clipped << " clipped samples";
        std::cout << ")\n";
    });

    // ---- beamform -------------------------------------------------------
    auto* beamform = app.add_subcommand("beamform", "scan a recording over the steering grid");
    GeometryFlags bf_geo;
    bf_geo.attach(beamform);
    std::string bf_in, bf_out;
    double bf_step = 1.0;
    std::optional<double> bf_freq, bf_azimuth;
    beamform->add_option("--in,-i", bf_in, "input WAV file")->required();
    beamform->add_option("--grid-step", bf_step, "steering grid step in degrees (default 1)");
    beamform->add_option("--frequency", [&bf_freq](const std::vector<std::string>& v) {
        bf_freq = std::stod(v.front());
        return true;
    }, "annotate the pattern with this frequency");
    beamform->add_option("--azimuth", [&bf_azimuth](const std::vector<std::string>& v) {
        bf_azimuth = std::stod(v.front());
        return true;
    }, "annotate the pattern with the true source azimuth");
    beamform->add_option("--out-dir", bf_out, "output directory")->required();
    beamform->callback([&] {
        const ArrayGeometry g = bf_geo.build();
        const auto wav = read_wav_file(bf_in);
        const auto grid = SteeringGrid::full_circle(bf_step);
        const BeamPattern p = beam_pattern(wav.recording, g, grid, bf_freq, bf_azimuth);
        fs::create_directories(bf_out);
        write_text(fs::path(bf_out) / "beam_pattern.csv", beam_pattern_csv(p));
        write_text(fs::path(bf_out) / "beam_pattern.json", beam_pattern_json(p).dump(2) + "\n");
        std::cout << "peak at " << peak_angle(p) << " deg\n";
    });

    // ---- compare --------------------------------------------------------
    auto* compare = app.add_subcommand(
        "compare", "experimental vs theoretical pattern for one angle/frequency cell");
    GeometryFlags cmp_geo;
    cmp_geo.attach(compare);
    std::string cmp_in, cmp_out;
    double cmp_azimuth = 0.0, cmp_freq = 1650.0, cmp_step = 1.0;
    double cmp_f0 = 0.0, cmp_f1 = 0.0;
    std::size_t cmp_window = 4096;
    compare->add_option("--in,-i", cmp_in, "input WAV file")->required();
    compare->add_option("--azimuth", cmp_azimuth, "true source azimuth in degrees")->required();
    compare->add_option("--frequency,-f", cmp_freq, "analysis frequency in Hz")->required();
    compare->add_option("--sweep-f0", cmp_f0, "sweep start Hz; with --sweep-f1 slices the input");
    compare->add_option("--sweep-f1", cmp_f1, "sweep end Hz");
    compare->add_option("--window", cmp_window, "analysis window in samples (default 4096)");
    compare->add_option("--grid-step", cmp_step, "steering grid step in degrees");
    compare->add_option("--out-dir", cmp_out, "output directory")->required();
    compare->callback([&] {
        const ArrayGeometry g = cmp_geo.build();
        auto rec = read_wav_file(cmp_in).recording;
        if (cmp_f0 > 0.0 && cmp_f1 > cmp_f0)
            rec = extract_band_segment(rec, LinearSweep{cmp_f0, cmp_f1}, cmp_freq, cmp_window);
        const auto grid = SteeringGrid::full_circle(cmp_step);
        const BeamPattern experimental = beam_pattern(rec, g, grid, cmp_freq, cmp_azimuth);
        const BeamPattern theoretical = theoretical_beam_pattern(g, cmp_azimuth, cmp_freq, grid);
        const ComparisonResult result = compare_patterns(theoretical, experimental);

        fs::create_directories(cmp_out);
        write_text(fs::path(cmp_out) / "experimental.csv", beam_pattern_csv(experimental));
        write_text(fs::path(cmp_out) / "theoretical.csv", beam_pattern_csv(theoretical));
        const nlohmann::json j{{"peak_delta_deg", result.peak_delta_deg},
                               {"area_difference", result.area_difference},
                               {"rmse_percent", result.rmse_percent}};
        write_text(fs::path(cmp_out) / "comparison.json", j.dump(2) + "\n");
        write_text(fs::path(cmp_out) / "overlay.svg",
                   emit_beam_pattern_svg(theoretical, experimental, cmp_azimuth));
        std::printf("peak_delta_deg=%.3f area_difference=%.6f rmse_percent=%.3f\n",
                    result.peak_delta_deg, result.area_difference, result.rmse_percent);
    });

    // ---- heatmap --------------------------------------------------------
    auto* heatmap = app.add_subcommand("heatmap", "render a heatmap JSON as SVG");
    std::string hm_in, hm_metric = "area_difference", hm_out;
    heatmap->add_option("--in,-i", hm_in, "heatmap JSON file")->required();
    heatmap->add_option("--metric", hm_metric, "area_difference | rmse_percent")
        ->check(CLI::IsMember({"area_difference", "rmse_percent"}));
    heatmap->add_option("--out-dir", hm_out, "output directory")->required();
    heatmap->callback([&] {
        std::ifstream in(hm_in);
        if (!in) fail(errc::parse_error, "cannot open " + hm_in);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            fail(errc::parse_error, std::string("not valid JSON: ") + e.what());
        }
        const HeatmapGrid grid = heatmap_from_json(j);
        const auto metric = hm_metric == "area_difference" ? HeatmapMetric::area_difference
                                                           : HeatmapMetric::rmse_percent;
        fs::create_directories(hm_out);
        const auto out_path = fs::path(hm_out) / ("heatmap_" + hm_metric + ".svg");
        write_text(out_path, emit_heatmap_svg(grid, metric));
        std::cout << "wrote " << out_path.string() << "\n";
    });

    // ---- experiment -----------------------------------------------------
    auto* experiment = app.add_subcommand(
        "experiment", "run the synthetic rotation protocol and write all artifacts");
    std::string exp_config, exp_out;
    std::optional<std::uint64_t> exp_seed;
    std::optional<std::size_t> exp_trials;
    experiment->add_option("--config", exp_config, "experiment config JSON");
    experiment->add_option("--seed", [&exp_seed](const std::vector<std::string>& v) {
        exp_seed = std::stoull(v.front());
        return true;
    }, "base seed; trial k uses seed+k (required unless the config lists seeds)");
    experiment->add_option("--trials", [&exp_trials](const std::vector<std::string>& v) {
        exp_trials = std::stoul(v.front());
        return true;
    }, "override the trial count");
    experiment->add_option("--out-dir", exp_out, "output directory")->required();
    experiment->callback([&] {
        bool config_has_seeds = false;
        ExperimentConfig cfg = load_config(exp_config, &config_has_seeds);
        if (exp_trials) cfg.trials = *exp_trials;
        if (exp_seed) {
            cfg.seeds.clear();
            for (std::size_t k = 0; k < cfg.trials; ++k) cfg.seeds.push_back(*exp_seed + k);
        } else if (!config_has_seeds) {
            fail(errc::config_validation,
                 "seeds are required: pass --seed or list seeds in the config");
        } else if (exp_trials && cfg.seeds.size() != cfg.trials) {
            fail(errc::config_validation, "--trials conflicts with the config seed list");
        }
        const ExperimentReport report = run_experiment(cfg, exp_out);
        std::cout << report.summary_text();
    });

    // ---- ingest ---------------------------------------------------------
    auto* ingest = app.add_subcommand(
        "ingest", "analyze captured WAV recordings named angle_<deg>.wav");
    std::string ing_config, ing_in, ing_out;
    ingest->add_option("--config", ing_config, "experiment config JSON");
    ingest->add_option("--in-dir", ing_in, "directory with trial_<k>/angle_<deg>.wav")->required();
    ingest->add_option("--out-dir", ing_out, "output directory")->required();
    ingest->callback([&] {
        const ExperimentConfig cfg = load_config(ing_config);
        const ExperimentReport report = ingest_experiment(ing_in, cfg, ing_out);
        std::cout << report.summary_text();
    });

    // ---- aliasing-check -------------------------------------------------
    auto* aliasing = app.add_subcommand(
        "aliasing-check", "spacing bound and aliasing limit for a uniform array");
    double ac_spacing = 0.084, ac_c = kDefaultSpeedOfSound;
    std::optional<double> ac_freq, ac_fmax;
    aliasing->add_option("--spacing,-d", ac_spacing, "inter-element spacing in meters")->required();
    aliasing->add_option("--speed-of-sound,-c", ac_c, "speed of sound in m/s (default 343)");
    aliasing->add_option("--frequency,-f", [&ac_freq](const std::vector<std::string>& v) {
        ac_freq = std::stod(v.front());
        return true;
    }, "signal frequency to check in Hz");
    aliasing->add_option("--f-max", [&ac_fmax](const std::vector<std::string>& v) {
        ac_fmax = std::stod(v.front());
        return true;
    }, "report the spacing bound for this maximum frequency");
    aliasing->callback([&] {
        const ArrayGeometry g = uniform_linear(2, ac_spacing, ac_c);
        std::printf("max unaliased frequency: %.2f Hz\n", max_unaliased_frequency(g));
        if (ac_fmax)
            std::printf("min spacing bound for %.2f Hz: %.6f m\n", *ac_fmax,
                        min_spacing_for(*ac_fmax, ac_c));
        if (ac_freq) {
            const bool aliased = is_spatially_aliased(g, *ac_freq);
            std::printf("%.2f Hz at d=%.4f m: %s\n", *ac_freq, ac_spacing,
                        aliased ? "ALIASED (grating lobes expected)" : "OK (no spatial aliasing)");
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
