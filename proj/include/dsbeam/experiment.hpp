#ifndef DSBEAM_EXPERIMENT_HPP
#define DSBEAM_EXPERIMENT_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsbeam/beamformer.hpp"
#include "dsbeam/error.hpp"
#include "dsbeam/export.hpp"
#include "dsbeam/geometry.hpp"
#include "dsbeam/metrics.hpp"
#include "dsbeam/svg.hpp"
#include "dsbeam/synthesis.hpp"
#include "dsbeam/wav.hpp"

namespace dsbeam {

struct GeometryParams {
    std::size_t elements = 2;
    double spacing_m = 0.084;
    double speed_of_sound_mps = kDefaultSpeedOfSound;

    ArrayGeometry build() const { return uniform_linear(elements, spacing_m, speed_of_sound_mps); }
};

struct SweepSettings {
    double f0_hz = 500.0;
    double f1_hz = 3000.0;
    double duration_s = 10.0;
    double amplitude = 0.5;
};

/// Full description of one simulated (or ingested) rotation experiment:
/// a sweep recording per array angle, sliced per analysis frequency, compared
/// against the ideal narrowband pattern cell by cell.
struct ExperimentConfig {
    GeometryParams geometry;
    std::vector<double> array_angles_deg;  // default 0..340 step 20
    std::vector<double> frequencies_hz;    // default 500..3000 step 100
    SweepSettings sweep;
    double sample_rate_hz = 96000.0;
    std::size_t window_samples = 4096;
    double grid_step_deg = 1.0;
    DegradationSpec degradation;  // reflection azimuths are world-frame
    std::size_t trials = 1;
    std::vector<std::uint64_t> seeds{1};
    std::array<double, 2> summary_band_hz{500.0, 2000.0};
    bool write_wav = true;
    bool write_svg = true;

    static ExperimentConfig defaults() {
        ExperimentConfig cfg;
        for (double a = 0.0; a < 360.0; a += 20.0) cfg.array_angles_deg.push_back(a);
        for (double f = 500.0; f <= 3000.0; f += 100.0) cfg.frequencies_hz.push_back(f);
        return cfg;
    }

    /// The degraded variant standing in for an imperfect test chamber: one
    /// wall reflection plus mild sensor noise, three seeded trials.
    static ExperimentConfig default_degraded() {
        ExperimentConfig cfg = defaults();
        cfg.degradation.noise_rms = 0.02;
        cfg.degradation.reflections.push_back({300.0, 0.3, 0.002});
        cfg.trials = 3;
        cfg.seeds = {1, 2, 3};
        return cfg;
    }

    void validate() const {
        auto bad = [](const std::string& m) { fail(errc::config_validation, m); };
        if (geometry.elements < 2) bad("geometry.elements must be >= 2");
        if (!(geometry.spacing_m > 0.0)) bad("geometry.spacing_m must be positive");
        if (!(geometry.speed_of_sound_mps > 0.0)) bad("speed of sound must be positive");
        if (array_angles_deg.empty()) bad("array angle list must be non-empty");
        if (frequencies_hz.empty()) bad("frequency list must be non-empty");
        std::set<double> angle_set(array_angles_deg.begin(), array_angles_deg.end());
        if (angle_set.size() != array_angles_deg.size()) bad("duplicate array angles");
        for (double a : array_angles_deg)
            if (a < 0.0 || a >= 360.0) bad("array angles must be in [0, 360)");
        if (!(sweep.f0_hz > 0.0) || !(sweep.f1_hz > sweep.f0_hz)) bad("sweep requires f1 > f0 > 0");
        if (!(sweep.duration_s > 0.0)) bad("sweep duration must be positive");
        if (!(sweep.amplitude > 0.0) || sweep.amplitude > 1.0) bad("amplitude must be in (0, 1]");
        std::set<double> freq_set(frequencies_hz.begin(), frequencies_hz.end());
        if (freq_set.size() != frequencies_hz.size()) bad("duplicate frequencies");
        for (double f : frequencies_hz)
            if (f < sweep.f0_hz || f > sweep.f1_hz)
                bad("frequency " + detail::fmt_double(f) + " Hz outside sweep band");
        if (!(sample_rate_hz > 0.0)) bad("sample rate must be positive");
        if (sample_rate_hz < 2.0 * sweep.f1_hz) bad("sample rate below temporal Nyquist");
        if (window_samples == 0) bad("window_samples must be positive");
        if (static_cast<double>(window_samples) > sweep.duration_s * sample_rate_hz)
            bad("analysis window longer than the sweep recording");
        if (!(grid_step_deg > 0.0)) bad("grid step must be positive");
        if (trials < 1) bad("trials must be >= 1");
        if (seeds.size() != trials) bad("need one seed per trial");
        if (summary_band_hz[0] > summary_band_hz[1]) bad("summary band is inverted");
        try {
            validate_degradation(degradation);
        } catch (const Error& e) {
            bad(e.what());
        }
    }

    nlohmann::json to_json() const {
        nlohmann::json refl = nlohmann::json::array();
        for (const auto& r : degradation.reflections)
            refl.push_back({{"azimuth_deg", r.azimuth_deg},
                            {"gain", r.gain},
                            {"extra_delay_s", r.extra_delay_s}});
        return nlohmann::json{
            {"geometry",
             {{"elements", geometry.elements},
              {"spacing_m", geometry.spacing_m},
              {"speed_of_sound_mps", geometry.speed_of_sound_mps}}},
            {"array_angles_deg", array_angles_deg},
            {"frequencies_hz", frequencies_hz},
            {"sweep",
             {{"f0_hz", sweep.f0_hz},
              {"f1_hz", sweep.f1_hz},
              {"duration_s", sweep.duration_s},
              {"amplitude", sweep.amplitude}}},
            {"sample_rate_hz", sample_rate_hz},
            {"window_samples", window_samples},
            {"grid_step_deg", grid_step_deg},
            {"degradation", {{"noise_rms", degradation.noise_rms}, {"reflections", refl}}},
            {"trials", trials},
            {"seeds", seeds},
            {"summary_band_hz", summary_band_hz},
            {"write_wav", write_wav},
            {"write_svg", write_svg}};
    }

    /// Partial configs are fine: absent fields keep the protocol defaults.
    static ExperimentConfig from_json(const nlohmann::json& j) {
        ExperimentConfig cfg = defaults();
        try {
            if (j.contains("geometry")) {
                const auto& g = j.at("geometry");
                if (g.contains("elements")) cfg.geometry.elements = g.at("elements").get<std::size_t>();
                if (g.contains("spacing_m")) cfg.geometry.spacing_m = g.at("spacing_m").get<double>();
                if (g.contains("speed_of_sound_mps"))
                    cfg.geometry.speed_of_sound_mps = g.at("speed_of_sound_mps").get<double>();
            }
            if (j.contains("array_angles_deg"))
                cfg.array_angles_deg = j.at("array_angles_deg").get<std::vector<double>>();
            if (j.contains("frequencies_hz"))
                cfg.frequencies_hz = j.at("frequencies_hz").get<std::vector<double>>();
            if (j.contains("sweep")) {
                const auto& s = j.at("sweep");
                if (s.contains("f0_hz")) cfg.sweep.f0_hz = s.at("f0_hz").get<double>();
                if (s.contains("f1_hz")) cfg.sweep.f1_hz = s.at("f1_hz").get<double>();
                if (s.contains("duration_s")) cfg.sweep.duration_s = s.at("duration_s").get<double>();
                if (s.contains("amplitude")) cfg.sweep.amplitude = s.at("amplitude").get<double>();
            }
            if (j.contains("sample_rate_hz")) cfg.sample_rate_hz = j.at("sample_rate_hz").get<double>();
            if (j.contains("window_samples"))
                cfg.window_samples = j.at("window_samples").get<std::size_t>();
            if (j.contains("grid_step_deg")) cfg.grid_step_deg = j.at("grid_step_deg").get<double>();
            if (j.contains("degradation")) {
                const auto& d = j.at("degradation");
                if (d.contains("noise_rms")) cfg.degradation.noise_rms = d.at("noise_rms").get<double>();
                if (d.contains("reflections")) {
                    cfg.degradation.reflections.clear();
                    for (const auto& r : d.at("reflections"))
                        cfg.degradation.reflections.push_back({r.at("azimuth_deg").get<double>(),
                                                               r.at("gain").get<double>(),
                                                               r.value("extra_delay_s", 0.0)});
                }
            }
            if (j.contains("trials")) cfg.trials = j.at("trials").get<std::size_t>();
            if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
            if (j.contains("summary_band_hz")) {
                const auto band = j.at("summary_band_hz").get<std::vector<double>>();
                if (band.size() != 2) fail(errc::config_validation, "summary_band_hz needs 2 values");
                cfg.summary_band_hz = {band[0], band[1]};
            }
            if (j.contains("write_wav")) cfg.write_wav = j.at("write_wav").get<bool>();
            if (j.contains("write_svg")) cfg.write_svg = j.at("write_svg").get<bool>();
        } catch (const nlohmann::json::exception& e) {
            fail(errc::config_validation, std::string("bad config JSON: ") + e.what());
        }
        return cfg;
    }
};

struct CellFailure {
    double array_angle_deg = 0.0;
    double frequency_hz = 0.0;
    std::string message;
};

struct TrialReport {
    std::size_t trial_number = 1;  // 1-based, mirrors the report layout
    std::uint64_t seed = 0;
    std::vector<HeatmapCell> cells;
    std::vector<CellFailure> failures;
    double band_rmse_percent = std::numeric_limits<double>::quiet_NaN();
};

struct ExperimentReport {
    std::array<double, 2> band_hz{500.0, 2000.0};
    std::vector<TrialReport> trials;
    double overall_band_rmse_percent = std::numeric_limits<double>::quiet_NaN();

    /// Plain-text table in the trial/overall layout of the summary reports.
    std::string summary_text() const {
        std::string head = std::string(22, ' ');
        std::string row = "Average RMSE value    ";
        char buf[32];
        for (const auto& t : trials) {
            std::snprintf(buf, sizeof buf, "%9s", ("Trial " + std::to_string(t.trial_number)).c_str());
            head += buf;
            std::snprintf(buf, sizeof buf, "%8.2f%%", t.band_rmse_percent);
            row += buf;
        }
        std::snprintf(buf, sizeof buf, "%9s", "Overall");
        head += buf;
        std::snprintf(buf, sizeof buf, "%8.2f%%", overall_band_rmse_percent);
        row += buf;
        char band_line[96];
        std::snprintf(band_line, sizeof band_line, "Frequency band: %g - %g Hz\n", band_hz[0],
                      band_hz[1]);
        return head + "\n" + row + "\n" + band_line;
    }

    nlohmann::json summary_json() const {
        auto round2 = [](double v) { return std::round(v * 100.0) / 100.0; };
        std::vector<double> per_trial;
        for (const auto& t : trials) per_trial.push_back(round2(t.band_rmse_percent));
        return nlohmann::json{{"band_hz", band_hz},
                              {"per_trial_rmse_percent", per_trial},
                              {"overall_rmse_percent", round2(overall_band_rmse_percent)}};
    }

    nlohmann::json to_json() const {
        nlohmann::json trials_j = nlohmann::json::array();
        for (const auto& t : trials) {
            nlohmann::json fails = nlohmann::json::array();
            for (const auto& f : t.failures)
                fails.push_back({{"array_angle_deg", f.array_angle_deg},
                                 {"frequency_hz", f.frequency_hz},
                                 {"error", f.message}});
            trials_j.push_back({{"trial", t.trial_number},
                                {"seed", t.seed},
                                {"completed_cells", t.cells.size()},
                                {"band_rmse_percent", t.band_rmse_percent},
                                {"failures", fails}});
        }
        return nlohmann::json{{"band_hz", band_hz},
                              {"trials", trials_j},
                              {"overall_band_rmse_percent", overall_band_rmse_percent}};
    }
};

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::parse_error, "cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(errc::parse_error, "short write to " + path.string());
}

inline double wrap_360(double deg) {
    double x = std::fmod(deg, 360.0);
    if (x < 0.0) x += 360.0;
    return x;
}

inline std::string angle_file_name(double angle_deg) {
    return "angle_" + fmt_double(angle_deg) + ".wav";
}

// Reflections are configured in the world frame; rotating the array by
// `array_angle` rotates every external direction by the same amount.
inline DegradationSpec rotated_degradation(const DegradationSpec& d, double array_angle_deg) {
    DegradationSpec out = d;
    for (auto& r : out.reflections) r.azimuth_deg = wrap_360(r.azimuth_deg + array_angle_deg);
    return out;
}

inline MultichannelRecording synthesize_trial_angle(const ExperimentConfig& cfg,
                                                    const ArrayGeometry& geometry,
                                                    std::uint64_t trial_seed,
                                                    std::size_t angle_index) {
    SourceSpec src;
    src.azimuth_deg = cfg.array_angles_deg[angle_index];
    src.waveform = LinearSweep{cfg.sweep.f0_hz, cfg.sweep.f1_hz};
    src.amplitude = cfg.sweep.amplitude;
    src.duration_s = cfg.sweep.duration_s;
    const DegradationSpec degrade =
        rotated_degradation(cfg.degradation, cfg.array_angles_deg[angle_index]);
    return synthesize(src, geometry, cfg.sample_rate_hz, degrade,
                      mix_seed(trial_seed, angle_index));
}

// Analyze one recording at every configured frequency; failures become gaps.
inline void analyze_angle(const ExperimentConfig& cfg, const ArrayGeometry& geometry,
                          const SteeringGrid& grid, const MultichannelRecording& rec,
                          double array_angle_deg, TrialReport& trial) {
    const LinearSweep sweep{cfg.sweep.f0_hz, cfg.sweep.f1_hz};
    for (double f : cfg.frequencies_hz) {
        try {
            const MultichannelRecording seg =
                extract_band_segment(rec, sweep, f, cfg.window_samples);
            const BeamPattern experimental = beam_pattern(seg, geometry, grid, f, array_angle_deg);
            const BeamPattern theoretical =
                theoretical_beam_pattern(geometry, array_angle_deg, f, grid);
            trial.cells.push_back({array_angle_deg, f, compare_patterns(theoretical, experimental)});
        } catch (const Error& e) {
            trial.failures.push_back({array_angle_deg, f, e.what()});
        }
    }
}

inline double trial_band_rmse(const ExperimentConfig& cfg, const TrialReport& t) {
    double acc = 0.0;
    std::size_t n = 0;
    for (const auto& c : t.cells) {
        if (c.frequency_hz < cfg.summary_band_hz[0] || c.frequency_hz > cfg.summary_band_hz[1])
            continue;
        acc += c.result.rmse_percent;
        ++n;
    }
    return n ? acc / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

inline void write_trial_artifacts(const ExperimentConfig& cfg,
                                  const std::filesystem::path& trial_dir, TrialReport& trial) {
    std::filesystem::create_directories(trial_dir);
    std::vector<HeatmapCell> sorted = trial.cells;
    std::sort(sorted.begin(), sorted.end(), [](const HeatmapCell& a, const HeatmapCell& b) {
        return a.array_angle_deg != b.array_angle_deg ? a.array_angle_deg < b.array_angle_deg
                                                      : a.frequency_hz < b.frequency_hz;
    });

    if (trial.failures.empty() && !sorted.empty()) {
        const HeatmapGrid grid = build_heatmap(sorted);
        write_text_file(trial_dir / "heatmap.csv", heatmap_csv(grid));
        write_text_file(trial_dir / "heatmap.json", heatmap_json(grid).dump(2) + "\n");
        if (cfg.write_svg) {
            write_text_file(trial_dir / "heatmap_area_difference.svg",
                            emit_heatmap_svg(grid, HeatmapMetric::area_difference));
            write_text_file(trial_dir / "heatmap_rmse_percent.svg",
                            emit_heatmap_svg(grid, HeatmapMetric::rmse_percent));
        }
    } else {
        // incomplete grid: keep the long-form rows for the cells that exist
        std::string csv = "array_angle_deg,frequency_hz,area_difference,rmse_percent,peak_delta_deg\n";
        for (const auto& c : sorted) {
            csv += fmt_double(c.array_angle_deg) + "," + fmt_double(c.frequency_hz) + "," +
                   fmt_double(c.result.area_difference) + "," + fmt_double(c.result.rmse_percent) +
                   "," + fmt_double(c.result.peak_delta_deg) + "\n";
        }
        write_text_file(trial_dir / "heatmap.csv", csv);
    }
}

inline ExperimentReport finalize_report(const ExperimentConfig& cfg,
                                        std::vector<TrialReport> trials,
                                        const std::filesystem::path& out_dir) {
    ExperimentReport report;
    report.band_hz = cfg.summary_band_hz;
    report.trials = std::move(trials);

    for (const auto& t : report.trials)
        if (t.cells.empty())
            fail(errc::experiment_failed,
                 "trial " + std::to_string(t.trial_number) + ": every cell failed");

    double acc = 0.0;
    for (auto& t : report.trials) acc += t.band_rmse_percent;
    report.overall_band_rmse_percent = acc / static_cast<double>(report.trials.size());

    std::filesystem::create_directories(out_dir);
    write_text_file(out_dir / "config.json", cfg.to_json().dump(2) + "\n");
    write_text_file(out_dir / "summary.txt", report.summary_text());
    write_text_file(out_dir / "summary.json", report.summary_json().dump(2) + "\n");
    write_text_file(out_dir / "report.json", report.to_json().dump(2) + "\n");
    return report;
}

}  // namespace detail

/// Runs the synthetic rotation protocol end to end: per trial and array angle,
/// synthesize a sweep recording (optionally persisting it as 16-bit WAV — in
/// that case the quantized samples are what gets analyzed, so the emitted
/// files are the authoritative dataset), slice it at each analysis frequency,
/// beamform, compare against the ideal pattern, and write per-trial heatmaps
/// plus the trial/overall RMSE summary under out_dir.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                       const std::filesystem::path& out_dir) {
    cfg.validate();
    const ArrayGeometry geometry = cfg.geometry.build();
    const SteeringGrid grid = SteeringGrid::full_circle(cfg.grid_step_deg);

    std::vector<TrialReport> trials;
    for (std::size_t k = 0; k < cfg.trials; ++k) {
        TrialReport trial;
        trial.trial_number = k + 1;
        trial.seed = cfg.seeds[k];
        const std::filesystem::path trial_dir = out_dir / ("trial_" + std::to_string(k + 1));
        if (cfg.write_wav) std::filesystem::create_directories(trial_dir);

        for (std::size_t ai = 0; ai < cfg.array_angles_deg.size(); ++ai) {
            const double angle = cfg.array_angles_deg[ai];
            MultichannelRecording rec =
                detail::synthesize_trial_angle(cfg, geometry, trial.seed, ai);
            if (cfg.write_wav) {
                WavSpec spec{static_cast<std::uint32_t>(cfg.sample_rate_hz), 16,
                             static_cast<std::uint16_t>(rec.channel_count())};
                const WavWriteResult wav = write_wav(spec, rec);
                detail::write_text_file(trial_dir / detail::angle_file_name(angle),
                                        std::string(wav.bytes.begin(), wav.bytes.end()));
                rec = read_wav(wav.bytes).recording;
            }
            detail::analyze_angle(cfg, geometry, grid, rec, angle, trial);
        }
        trial.band_rmse_percent = detail::trial_band_rmse(cfg, trial);
        detail::write_trial_artifacts(cfg, trial_dir, trial);
        trials.push_back(std::move(trial));
    }
    return detail::finalize_report(cfg, std::move(trials), out_dir);
}

/// Same analysis on recordings captured elsewhere: expects
/// in_dir/trial_<k>/angle_<deg>.wav (or angle files directly in in_dir for a
/// single trial). Missing files raise incomplete-dataset up front; unreadable
/// ones degrade to per-angle gaps recorded in the report.
inline ExperimentReport ingest_experiment(const std::filesystem::path& in_dir,
                                          const ExperimentConfig& cfg,
                                          const std::filesystem::path& out_dir) {
    cfg.validate();
    const ArrayGeometry geometry = cfg.geometry.build();
    const SteeringGrid grid = SteeringGrid::full_circle(cfg.grid_step_deg);

    // resolve per-trial directories and check the dataset is complete
    std::vector<std::filesystem::path> trial_dirs;
    std::vector<std::string> missing;
    for (std::size_t k = 0; k < cfg.trials; ++k) {
        std::filesystem::path dir = in_dir / ("trial_" + std::to_string(k + 1));
        if (!std::filesystem::is_directory(dir)) {
            if (cfg.trials == 1 && std::filesystem::is_directory(in_dir))
                dir = in_dir;
            else {
                missing.push_back(dir.string());
                trial_dirs.push_back(dir);
                continue;
            }
        }
        trial_dirs.push_back(dir);
        for (double angle : cfg.array_angles_deg) {
            const auto f = dir / detail::angle_file_name(angle);
            if (!std::filesystem::is_regular_file(f)) missing.push_back(f.string());
        }
    }
    if (!missing.empty()) {
        std::string list;
        for (std::size_t i = 0; i < missing.size(); ++i)
            list += (i ? ", " : "") + missing[i];
        fail(errc::incomplete_dataset, "missing: " + list);
    }

    std::vector<TrialReport> trials;
    for (std::size_t k = 0; k < cfg.trials; ++k) {
        TrialReport trial;
        trial.trial_number = k + 1;
        trial.seed = cfg.seeds[k];
        for (std::size_t ai = 0; ai < cfg.array_angles_deg.size(); ++ai) {
            const double angle = cfg.array_angles_deg[ai];
            const auto path = trial_dirs[k] / detail::angle_file_name(angle);
            MultichannelRecording rec;
            try {
                WavReadResult r = read_wav_file(path);
                rec = std::move(r.recording);
                if (rec.channel_count() != geometry.size())
                    fail(errc::shape_error,
                         path.filename().string() + ": channel count " +
                             std::to_string(rec.channel_count()) + " does not match " +
                             std::to_string(geometry.size()) + " elements");
            } catch (const Error& e) {
                for (double f : cfg.frequencies_hz)
                    trial.failures.push_back({angle, f, e.what()});
                continue;
            }
            detail::analyze_angle(cfg, geometry, grid, rec, angle, trial);
        }
        trial.band_rmse_percent = detail::trial_band_rmse(cfg, trial);
        detail::write_trial_artifacts(cfg, out_dir / ("trial_" + std::to_string(k + 1)), trial);
        trials.push_back(std::move(trial));
    }
    return detail::finalize_report(cfg, std::move(trials), out_dir);
}

}  // namespace dsbeam

#endif
