#include "commands.hpp"

#include "sisfit/errors.hpp"
#include "sisfit/sis_model.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

namespace sisfit::cli {

namespace {

constexpr double kParsevalTolerance = 1e-9;
constexpr double kFiberTolerance = 1e-10;
constexpr double kFormulaTolerance = 1e-9;

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kParseFailure;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kConfigFailure;
    } catch (const InputError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kConfigFailure;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalFailure;
    }
}

SignalSet load_data(const RunConfig& config) {
    SignalSet signals = parse_signals(config.input, config);
    if (config.weights) {
        // Weights are applied by the library; here only their count is checked early.
        const WeightVector w = parse_weights(*config.weights);
        if (w.size() != signals.count()) {
            throw ConfigError("weights file has " + std::to_string(w.size()) + " entries for " +
                              std::to_string(signals.count()) + " signals");
        }
    }
    return signals;
}

// Data for verify/project must sit on the model's grid.
SignalSet load_on_grid(const RunConfig& config, const GridSpec& grid) {
    const Table table = read_table(config.input);
    if (table.rows != grid.total()) {
        throw ConfigError(config.input + " has " + std::to_string(table.rows) + " rows, the model grid has " +
                          std::to_string(grid.total()) + " samples");
    }
    return signals_from_table(table, grid, config.complex_input, config.input);
}

struct Check {
    std::string name;
    double value;
    double tolerance;
    bool pass;
};

void print_checks(std::ostream& out, const std::vector<Check>& checks) {
    const auto saved = out.precision(6);
    out << std::left << std::setw(22) << "check" << std::setw(16) << "value" << std::setw(14) << "tolerance"
        << "result\n";
    for (const auto& c : checks) {
        out << std::left << std::setw(22) << c.name << std::setw(16) << std::scientific << c.value << std::setw(14)
            << c.tolerance << std::defaultfloat << (c.pass ? "PASS" : "FAIL") << '\n';
    }
    out.precision(saved);
}

} // namespace

int cmd_fit(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        validate(config);
        const SignalSet signals = load_data(config);
        FitSettings settings;
        settings.tolerances = config.tolerances();
        settings.gamma = config.gamma;
        if (config.weights) {
            settings.weights = parse_weights(*config.weights);
        }
        const FitOutcome outcome = fit(signals, config.generators, settings);
        const auto& bounds = outcome.report.frame_bounds;
        if (bounds && bounds->samples > 0 && !(std::isfinite(bounds->lower) && std::isfinite(bounds->upper))) {
            throw NumericalError("frame bounds are not finite");
        }
        write_report(out, outcome.report, config.format);
        if (config.output) {
            save_model(*config.output, to_model_file(outcome));
        }
        return static_cast<int>(kSuccess);
    });
}

int cmd_error_curve(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        validate(config);
        SignalSet signals = load_data(config);
        if (config.weights) {
            signals = apply_weights(signals, parse_weights(*config.weights));
        }
        CurveOptions options;
        options.tolerances = config.tolerances();
        options.gamma = config.gamma;
        ApproximationReport report = error_curve(signals, options);
        report.weighted = config.weights.has_value();
        if (config.format == OutputFormat::text) {
            const auto saved = out.precision(std::numeric_limits<double>::max_digits10);
            out << "# n E(F,n)\n";
            for (std::size_t n = 0; n < report.curve.size(); ++n) {
                out << n << ' ' << report.curve[n] << '\n';
            }
            out.precision(saved);
        }
        write_report(out, report, config.format);
        return static_cast<int>(kSuccess);
    });
}

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (config.trials < 1) {
            throw ConfigError("--trials must be at least 1");
        }
        const ModelFile file = load_model(config.model);
        const SisModel model = to_model(file);
        const SignalSet signals = load_on_grid(config, model.grid());
        const GridSpec& grid = model.grid();
        const auto p = static_cast<double>(grid.fiber_count());

        std::vector<Check> checks;

        const FrameBounds bounds = verify_parseval(model, config.trials);
        const double parseval_dev = std::max(std::abs(bounds.lower - 1.0), std::abs(bounds.upper - 1.0));
        checks.push_back({"parseval_frame", parseval_dev, kParsevalTolerance, parseval_dev <= kParsevalTolerance});

        double norm_dev = 0.0;
        double cross = 0.0;
        for (std::size_t w = 0; w < grid.fiber_count(); ++w) {
            const CMatrix& f = model.fiber(w);
            for (std::size_t i = 0; i < f.cols(); ++i) {
                const double scaled = p * norm_sq(f.col(i));
                norm_dev = std::max(norm_dev, std::min(std::abs(scaled), std::abs(scaled - 1.0)));
                for (std::size_t j = i + 1; j < f.cols(); ++j) {
                    cross = std::max(cross, p * std::abs(inner(f.col(i), f.col(j))));
                }
            }
        }
        checks.push_back({"fiber_norms", norm_dev, kFiberTolerance, norm_dev <= kFiberTolerance});
        checks.push_back({"cross_orthogonality", cross, kFiberTolerance, cross <= kFiberTolerance});

        const FiberSet data = fiberize(signals);
        double largest = 0.0;
        for (const auto& a : data.fibers) {
            for (std::size_t j = 0; j < a.cols(); ++j) {
                largest = std::max(largest, norm(a.col(j)));
            }
        }
        double containment = 0.0;
        for (std::size_t w = 0; w < grid.fiber_count(); ++w) {
            const CMatrix basis = orthonormal_basis(data.fibers[w], kFiberTolerance, kFiberTolerance * largest);
            const CMatrix& f = model.fiber(w);
            for (std::size_t i = 0; i < f.cols(); ++i) {
                const double len = norm(f.col(i));
                if (p * len * len < 0.5) {
                    continue;
                }
                CVector r = f.col_vector(i);
                for (std::size_t c = 0; c < basis.cols(); ++c) {
                    axpy(-inner(r, basis.col(c)), basis.col(c), r);
                }
                containment = std::max(containment, norm(r) / len);
            }
        }
        checks.push_back({"containment", containment, kFiberTolerance, containment <= kFiberTolerance});

        const double stored =
            model.size() < file.error_curve.size() ? file.error_curve[model.size()] : file.error;
        const double direct = direct_error(model, signals);
        const double formula_dev = std::abs(stored - direct);
        const double formula_tol = kFormulaTolerance * (1.0 + stored);
        checks.push_back({"formula_vs_direct", formula_dev, formula_tol, formula_dev <= formula_tol});

        print_checks(out, checks);
        const bool all = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
        return static_cast<int>(all ? kSuccess : kVerificationFailure);
    });
}

int cmd_project(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const SisModel model = to_model(load_model(config.model));
        const SignalSet signals = load_on_grid(config, model.grid());
        std::vector<CVector> projected;
        std::vector<double> residuals;
        for (const auto& f : signals.signals()) {
            CVector pf = project(model, f);
            CVector r(f.size());
            for (std::size_t k = 0; k < f.size(); ++k) {
                r[k] = f[k] - pf[k];
            }
            residuals.push_back(norm(r));
            projected.push_back(std::move(pf));
        }
        if (config.output) {
            std::ofstream file(*config.output);
            if (!file) {
                throw ConfigError("cannot write " + *config.output);
            }
            write_signals(file, projected);
        } else {
            write_signals(out, projected);
        }
        const auto saved = out.precision(std::numeric_limits<double>::max_digits10);
        for (std::size_t j = 0; j < residuals.size(); ++j) {
            out << "# residual_norm " << j << ' ' << residuals[j] << '\n';
        }
        out.precision(saved);
        return static_cast<int>(kSuccess);
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal shift-invariant subspace fitting with Parseval frame generators", "sisfit"};
    app.require_subcommand(1);

    RunConfig config;
    std::string format = "text";

    const auto add_grid = [&](CLI::App* sub) {
        sub->add_option("--axes", config.axes, "Per-axis sample counts N1,N2,... (default: row count)")
            ->delimiter(',');
        sub->add_option("--phases", config.phases, "Per-axis shift-phase counts P1,P2,...")
            ->delimiter(',')
            ->required();
    };
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input", config.input, "Signal table, one column per signal")->required();
        sub->add_flag("--complex", config.complex_input, "Columns are (re, im) pairs");
    };
    const auto add_fit_options = [&](CLI::App* sub) {
        sub->add_option("--weights", config.weights, "File with one positive weight per signal");
        sub->add_option("--rank-tol", config.rank_tolerance, "Relative eigenvalue rank tolerance");
        sub->add_option("--gap-tol", config.gap_tolerance, "Relative spectral gap tolerance");
        sub->add_option("--gamma", config.gamma, "Order penalty for J(n) = E(F,n) + gamma n");
        sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
    };

    CLI::App* fit_cmd = app.add_subcommand("fit", "Fit an optimal model and write it to --out");
    add_common(fit_cmd);
    add_grid(fit_cmd);
    add_fit_options(fit_cmd);
    fit_cmd->add_option("--gens", config.generators, "Number of generators n");
    fit_cmd->add_option("--out", config.output, "Model file to write");

    CLI::App* curve_cmd = app.add_subcommand("error-curve", "Print E(F,n) for every n");
    add_common(curve_cmd);
    add_grid(curve_cmd);
    add_fit_options(curve_cmd);

    CLI::App* verify_cmd = app.add_subcommand("verify", "Check a model file against data");
    add_common(verify_cmd);
    verify_cmd->add_option("--model", config.model, "Model file")->required();
    verify_cmd->add_option("--trials", config.trials, "Random signals for the Parseval check");

    CLI::App* project_cmd = app.add_subcommand("project", "Project signals onto a model space");
    add_common(project_cmd);
    project_cmd->add_option("--model", config.model, "Model file")->required();
    project_cmd->add_option("--out", config.output, "Where to write the projected signals");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? static_cast<int>(kSuccess) : static_cast<int>(kConfigFailure);
    }
    config.format = format == "json" ? OutputFormat::json : OutputFormat::text;

    if (fit_cmd->parsed()) {
        return cmd_fit(config, out, err);
    }
    if (curve_cmd->parsed()) {
        return cmd_error_curve(config, out, err);
    }
    if (verify_cmd->parsed()) {
        return cmd_verify(config, out, err);
    }
    return cmd_project(config, out, err);
}

} // namespace sisfit::cli
