#include "sisfit/io.hpp"

#include "sisfit/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace sisfit {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kModelTag = "sisfit-model";

std::string describe(const std::string& source, std::size_t line, const std::string& message) {
    std::ostringstream os;
    os << source;
    if (line > 0) {
        os << ":" << line;
    }
    os << ": " << message;
    return os.str();
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == ',' || line[i] == '\r')) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != ',' && line[i] != '\r') {
            ++i;
        }
        if (i > start) {
            cells.push_back(line.substr(start, i - start));
        }
    }
    return cells;
}

bool parse_double(std::string_view cell, double& value) {
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    return ec == std::errc{} && ptr == cell.data() + cell.size() && std::isfinite(value);
}

bool is_skippable(std::string_view line) {
    for (char c : line) {
        if (c == '#') {
            return true;
        }
        if (c != ' ' && c != '\t' && c != '\r' && c != ',') {
            return false;
        }
    }
    return true;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open file");
    }
    return in;
}

template <typename T>
T require_field(const Json& j, const char* key, const std::string& source) {
    if (!j.contains(key)) {
        throw ParseError(source, 0, std::string("missing field '") + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source, 0, std::string("field '") + key + "': " + e.what());
    }
}

double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

} // namespace

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(describe(source, line, message)), line_(line) {}

void validate(const RunConfig& config) {
    if (config.phases.empty()) {
        throw ConfigError("at least one phase count (--phases) is required");
    }
    if (!config.axes.empty() && config.axes.size() != config.phases.size()) {
        throw ConfigError("--axes lists " + std::to_string(config.axes.size()) + " sizes but --phases lists " +
                          std::to_string(config.phases.size()));
    }
    if (config.axes.empty() && config.phases.size() != 1) {
        throw ConfigError("--axes is required for multi-dimensional grids");
    }
    for (std::size_t j = 0; j < config.phases.size(); ++j) {
        if (config.phases[j] == 0) {
            throw ConfigError("phase counts must be positive");
        }
        if (!config.axes.empty()) {
            if (config.axes[j] == 0) {
                throw ConfigError("axis sizes must be positive");
            }
            if (config.axes[j] % config.phases[j] != 0) {
                throw ConfigError("phase count " + std::to_string(config.phases[j]) + " does not divide axis size " +
                                  std::to_string(config.axes[j]) + " (axis " + std::to_string(j) + ")");
            }
        }
    }
    if (config.generators < 0) {
        throw ConfigError("--gens must be non-negative");
    }
    if (!(config.rank_tolerance >= 0.0) || !(config.gap_tolerance >= 0.0)) {
        throw ConfigError("tolerances must be non-negative");
    }
    if (config.gamma && !(*config.gamma >= 0.0 && std::isfinite(*config.gamma))) {
        throw ConfigError("--gamma must be a finite non-negative number");
    }
    if (config.trials < 1) {
        throw ConfigError("--trials must be at least 1");
    }
}

Table read_table(std::istream& in, const std::string& source) {
    Table table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_skippable(line)) {
            continue;
        }
        const auto cells = split_cells(line);
        if (table.rows == 0) {
            table.cols = cells.size();
        } else if (cells.size() != table.cols) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(table.cols) + " columns, found " + std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            double v = 0.0;
            if (!parse_double(cells[c], v)) {
                throw ParseError(source, line_no,
                                 "column " + std::to_string(c + 1) + ": '" + std::string(cells[c]) + "' is not a finite number");
            }
            table.values.push_back(v);
        }
        ++table.rows;
    }
    if (table.rows == 0) {
        throw ParseError(source, 0, "no data rows");
    }
    return table;
}

Table read_table(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_table(in, path.string());
}

GridSpec make_grid(const RunConfig& config, std::size_t rows, const std::string& source) {
    validate(config);
    if (config.axes.empty()) {
        if (rows % config.phases.front() != 0) {
            throw ParseError(source, 0,
                             std::to_string(rows) + " rows are not divisible by the phase count " +
                                 std::to_string(config.phases.front()));
        }
        return GridSpec({rows}, config.phases);
    }
    GridSpec grid(config.axes, config.phases);
    if (grid.total() != rows) {
        throw ParseError(source, 0,
                         "file has " + std::to_string(rows) + " rows but the grid needs " + std::to_string(grid.total()));
    }
    return grid;
}

SignalSet signals_from_table(const Table& table, const GridSpec& grid, bool complex_input, const std::string& source) {
    if (table.rows != grid.total()) {
        throw ParseError(source, 0,
                         "file has " + std::to_string(table.rows) + " rows but the grid needs " + std::to_string(grid.total()));
    }
    if (complex_input && table.cols % 2 != 0) {
        throw ParseError(source, 0, "complex input needs an even number of columns (re, im pairs)");
    }
    const std::size_t m = complex_input ? table.cols / 2 : table.cols;
    std::vector<CVector> samples(m, CVector(table.rows));
    for (std::size_t r = 0; r < table.rows; ++r) {
        for (std::size_t j = 0; j < m; ++j) {
            samples[j][r] = complex_input ? Complex{table.at(r, 2 * j), table.at(r, 2 * j + 1)} : Complex{table.at(r, j)};
        }
    }
    return SignalSet(grid, std::move(samples));
}

SignalSet parse_signals(std::istream& in, const RunConfig& config, const std::string& source) {
    const Table table = read_table(in, source);
    return signals_from_table(table, make_grid(config, table.rows, source), config.complex_input, source);
}

SignalSet parse_signals(const std::filesystem::path& path, const RunConfig& config) {
    auto in = open_input(path);
    return parse_signals(in, config, path.string());
}

WeightVector parse_weights(const std::filesystem::path& path) {
    const Table table = read_table(path);
    try {
        return WeightVector(table.values);
    } catch (const InputError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

ModelFile to_model_file(const FitOutcome& outcome) {
    const SisModel& model = outcome.model;
    const ModelDiagnostics& diag = model.diagnostics();
    ModelFile file{ModelFile::kFormatVersion,
                   model.grid(),
                   outcome.profile.signal_count,
                   diag.requested,
                   model.generators(),
                   outcome.report.curve,
                   outcome.report.error,
                   diag.unique_flag,
                   diag.min_gap,
                   diag.r_min,
                   diag.r_max,
                   diag.length_actual,
                   outcome.report.weighted,
                   outcome.profile.tolerances};
    return file;
}

SisModel to_model(const ModelFile& file) {
    ModelDiagnostics diag;
    diag.requested = file.requested;
    diag.length_actual = file.length_actual;
    diag.r_min = file.r_min;
    diag.r_max = file.r_max;
    diag.unique_flag = file.unique_flag;
    diag.min_gap = file.min_gap;
    return SisModel(file.grid, file.generators, diag);
}

std::string serialize_model(const ModelFile& file) {
    Json j;
    j["format"] = kModelTag;
    j["format_version"] = file.format_version;
    j["grid"] = {{"axes", file.grid.axes()}, {"phases", file.grid.phases()}};
    j["signal_count"] = file.signal_count;
    j["n"] = file.generators.size();
    j["n_requested"] = file.requested;
    Json gens = Json::array();
    for (const auto& g : file.generators) {
        Json samples = Json::array();
        for (const auto& v : g) {
            samples.push_back(v.real());
            samples.push_back(v.imag());
        }
        gens.push_back(std::move(samples));
    }
    j["generators"] = std::move(gens);
    j["error_curve"] = file.error_curve;
    j["error"] = file.error;
    j["unique_flag"] = file.unique_flag;
    j["min_gap"] = finite_or_zero(file.min_gap);
    j["r_min"] = file.r_min;
    j["r_max"] = file.r_max;
    j["length_actual"] = file.length_actual;
    j["weighted"] = file.weighted;
    j["tolerances"] = {{"rank", file.tolerances.rank}, {"gap", file.tolerances.gap}};
    return j.dump(2) + "\n";
}

ModelFile deserialize_model(std::string_view text, const std::string& source) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(source, 0, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object() || require_field<std::string>(j, "format", source) != kModelTag) {
        throw ParseError(source, 0, "not a sisfit model file");
    }
    const int version = require_field<int>(j, "format_version", source);
    if (version != ModelFile::kFormatVersion) {
        throw ParseError(source, 0, "unsupported format_version " + std::to_string(version));
    }
    const Json grid_json = require_field<Json>(j, "grid", source);
    auto axes = require_field<std::vector<std::size_t>>(grid_json, "axes", source);
    auto phases = require_field<std::vector<std::size_t>>(grid_json, "phases", source);
    std::optional<GridSpec> grid;
    try {
        grid.emplace(std::move(axes), std::move(phases));
    } catch (const InputError& e) {
        throw ParseError(source, 0, e.what());
    }

    const auto raw = require_field<std::vector<std::vector<double>>>(j, "generators", source);
    std::vector<CVector> generators;
    generators.reserve(raw.size());
    for (const auto& samples : raw) {
        if (samples.size() != 2 * grid->total()) {
            throw ParseError(source, 0, "generator has " + std::to_string(samples.size()) +
                                            " interleaved values, expected " + std::to_string(2 * grid->total()));
        }
        CVector g(grid->total());
        for (std::size_t k = 0; k < g.size(); ++k) {
            g[k] = {samples[2 * k], samples[2 * k + 1]};
        }
        generators.push_back(std::move(g));
    }
    if (require_field<std::size_t>(j, "n", source) != generators.size()) {
        throw ParseError(source, 0, "field 'n' does not match the number of generators");
    }
    const Json tol = require_field<Json>(j, "tolerances", source);

    ModelFile file{version,
                   *grid,
                   require_field<std::size_t>(j, "signal_count", source),
                   require_field<int>(j, "n_requested", source),
                   std::move(generators),
                   require_field<std::vector<double>>(j, "error_curve", source),
                   require_field<double>(j, "error", source),
                   require_field<bool>(j, "unique_flag", source),
                   require_field<double>(j, "min_gap", source),
                   require_field<std::size_t>(j, "r_min", source),
                   require_field<std::size_t>(j, "r_max", source),
                   require_field<std::size_t>(j, "length_actual", source),
                   require_field<bool>(j, "weighted", source),
                   Tolerances{require_field<double>(tol, "rank", source), require_field<double>(tol, "gap", source)}};
    return file;
}

void save_model(const std::filesystem::path& path, const ModelFile& file) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    out << serialize_model(file);
    if (!out) {
        throw ConfigError("failed writing " + path.string());
    }
}

ModelFile load_model(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return deserialize_model(buffer.str(), path.string());
}

void write_signals(std::ostream& out, const std::vector<CVector>& signals) {
    const auto saved = out.precision(std::numeric_limits<double>::max_digits10);
    out << "# " << signals.size() << " signal(s) as (re, im) column pairs\n";
    const std::size_t rows = signals.empty() ? 0 : signals.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < signals.size(); ++j) {
            if (j > 0) {
                out << ' ';
            }
            out << signals[j][r].real() << ' ' << signals[j][r].imag();
        }
        out << '\n';
    }
    out.precision(saved);
}

void write_report(std::ostream& out, const ApproximationReport& report, OutputFormat format) {
    if (format == OutputFormat::json) {
        Json j;
        j["order"] = report.order;
        j["error"] = report.error;
        j["error_curve"] = report.curve;
        j["total_energy"] = report.total_energy;
        if (report.frame_bounds) {
            j["frame_bounds"] = {{"lower", report.frame_bounds->lower},
                                 {"upper", report.frame_bounds->upper},
                                 {"samples", report.frame_bounds->samples}};
        }
        j["unique_flag"] = report.unique_flag;
        j["min_gap"] = finite_or_zero(report.min_gap);
        j["r_min"] = report.r_min;
        j["r_max"] = report.r_max;
        j["length_actual"] = report.length_actual;
        j["weighted"] = report.weighted;
        if (report.gamma) {
            j["gamma"] = *report.gamma;
        }
        if (report.selected_order) {
            j["selected_order"] = *report.selected_order;
        }
        out << j.dump(2) << '\n';
        return;
    }
    const auto saved = out.precision(std::numeric_limits<double>::max_digits10);
    out << "order          " << report.order << '\n';
    out << "error          " << report.error << '\n';
    out << "total_energy   " << report.total_energy << '\n';
    out << "error_curve   ";
    for (double v : report.curve) {
        out << ' ' << v;
    }
    out << '\n';
    if (report.frame_bounds) {
        out << "frame_bounds   " << report.frame_bounds->lower << ' ' << report.frame_bounds->upper << '\n';
    }
    out << "unique         " << (report.unique_flag ? "yes" : "no") << '\n';
    out << "min_gap        " << report.min_gap << '\n';
    out << "r_min          " << report.r_min << '\n';
    out << "r_max          " << report.r_max << '\n';
    out << "length         " << report.length_actual << '\n';
    out << "weighted       " << (report.weighted ? "yes" : "no") << '\n';
    if (report.gamma) {
        out << "gamma          " << *report.gamma << '\n';
    }
    if (report.selected_order) {
        out << "selected_order " << *report.selected_order << '\n';
    }
    out.precision(saved);
}

} // namespace sisfit
