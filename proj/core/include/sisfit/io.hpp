#pragma once

#include "sisfit/fiber_transform.hpp"
#include "sisfit/sis_model.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sisfit {

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& message);
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Inconsistent command-line configuration (bad grid, weights, tolerances).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class OutputFormat { text, json };

struct RunConfig {
    std::string input;
    std::vector<std::size_t> axes;   ///< empty: one axis with the file's row count
    std::vector<std::size_t> phases;
    int generators = 1;
    std::optional<std::string> weights;
    bool complex_input = false;
    double rank_tolerance = kRankTolerance;
    double gap_tolerance = 1e-8;
    std::optional<double> gamma;
    std::optional<std::string> output;
    OutputFormat format = OutputFormat::text;
    std::string model;               ///< model path for verify / project
    int trials = 32;                 ///< Parseval trials for verify

    [[nodiscard]] Tolerances tolerances() const { return {rank_tolerance, gap_tolerance}; }
};

/// Throws ConfigError if the grid lists or tolerances are inconsistent
/// (phase count not dividing an axis, mismatched lengths, negative values).
void validate(const RunConfig& config);

/// Numeric table: one row per sample, one column per (real) signal component.
struct Table {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values; ///< row-major
    [[nodiscard]] double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// Reads whitespace- and/or comma-separated numbers. Blank lines and lines
/// starting with '#' are skipped. Throws ParseError with the line number on
/// ragged rows or non-numeric cells.
Table read_table(std::istream& in, const std::string& source = "<stream>");
Table read_table(const std::filesystem::path& path);

/// Grid for a table of `rows` samples under the config (infers a single axis when none is given).
GridSpec make_grid(const RunConfig& config, std::size_t rows, const std::string& source = "<input>");

/// Columns become signals; with complex_input, columns pair up as (re, im).
SignalSet signals_from_table(const Table& table, const GridSpec& grid, bool complex_input,
                             const std::string& source = "<input>");

SignalSet parse_signals(const std::filesystem::path& path, const RunConfig& config);
SignalSet parse_signals(std::istream& in, const RunConfig& config, const std::string& source = "<stream>");

/// One positive weight per signal, whitespace/comma separated.
WeightVector parse_weights(const std::filesystem::path& path);

/// Persistent form of a fitted model.
struct ModelFile {
    static constexpr int kFormatVersion = 1;

    int format_version = kFormatVersion;
    GridSpec grid;
    std::size_t signal_count = 0;
    int requested = 0;
    std::vector<CVector> generators;
    std::vector<double> error_curve;
    double error = 0.0;
    bool unique_flag = false;
    double min_gap = 0.0;
    std::size_t r_min = 0;
    std::size_t r_max = 0;
    std::size_t length_actual = 0;
    bool weighted = false;
    Tolerances tolerances;
};

ModelFile to_model_file(const FitOutcome& outcome);
SisModel to_model(const ModelFile& file);

/// Self-describing JSON text; identical input gives identical bytes.
std::string serialize_model(const ModelFile& file);
/// Throws ParseError on malformed JSON, missing fields or an unknown format_version.
ModelFile deserialize_model(std::string_view text, const std::string& source = "<model>");

void save_model(const std::filesystem::path& path, const ModelFile& file);
ModelFile load_model(const std::filesystem::path& path);

/// Writes signals as interleaved (re, im) columns, 17 significant digits.
void write_signals(std::ostream& out, const std::vector<CVector>& signals);

/// Human-readable or JSON rendering of a report.
void write_report(std::ostream& out, const ApproximationReport& report, OutputFormat format);

} // namespace sisfit
