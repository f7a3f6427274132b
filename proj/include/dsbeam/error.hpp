#ifndef DSBEAM_ERROR_HPP
#define DSBEAM_ERROR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace dsbeam {

/// Failure categories surfaced by the library. Every dsbeam::Error carries one.
enum class errc {
    invalid_geometry,
    invalid_frequency,
    aliased_synthesis,
    out_of_range,
    window_too_long,
    shape_error,
    degenerate_signal,
    undefined_snr,
    incomplete_grid,
    parse_error,
    unsupported_format,
    truncation_error,
    config_validation,
    incomplete_dataset,
    experiment_failed,
};

inline const char* errc_name(errc k) {
    switch (k) {
        case errc::invalid_geometry: return "invalid-geometry";
        case errc::invalid_frequency: return "invalid-frequency";
        case errc::aliased_synthesis: return "aliased-synthesis";
        case errc::out_of_range: return "out-of-range";
        case errc::window_too_long: return "window-too-long";
        case errc::shape_error: return "shape-error";
        case errc::degenerate_signal: return "degenerate-signal";
        case errc::undefined_snr: return "undefined-snr";
        case errc::incomplete_grid: return "incomplete-grid";
        case errc::parse_error: return "parse-error";
        case errc::unsupported_format: return "unsupported-format";
        case errc::truncation_error: return "truncation-error";
        case errc::config_validation: return "config-validation";
        case errc::incomplete_dataset: return "incomplete-dataset";
        case errc::experiment_failed: return "experiment-failed";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(errc kind, const std::string& message)
        : std::runtime_error(std::string(errc_name(kind)) + ": " + message), kind_(kind) {}

    /// Parse failures also record the byte offset of the offending input.
    Error(errc kind, const std::string& message, std::size_t byte_offset)
        : std::runtime_error(std::string(errc_name(kind)) + " at byte " +
                             std::to_string(byte_offset) + ": " + message),
          kind_(kind),
          byte_offset_(byte_offset) {}

    errc kind() const noexcept { return kind_; }
    std::optional<std::size_t> byte_offset() const noexcept { return byte_offset_; }

private:
    errc kind_;
    std::optional<std::size_t> byte_offset_;
};

[[noreturn]] inline void fail(errc kind, const std::string& message) { throw Error(kind, message); }

}  // namespace dsbeam

#endif
