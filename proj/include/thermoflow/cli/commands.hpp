#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "thermoflow/checks.hpp"
#include "thermoflow/cli/config.hpp"
#include "thermoflow/io/csv.hpp"
#include "thermoflow/io/svg.hpp"

namespace thermoflow::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitInvariantFailure = 1,
    kExitConfigError = 2,
    kExitNumericalFailure = 3,
};

inline constexpr std::size_t kMaxSweepCells = 10000;

struct CommandOptions {
    std::string config_path;
    Overrides overrides;
    std::string suite;
    std::optional<std::string> h_list;
    std::optional<std::string> gamma_list;
    bool order = false;
    unsigned threads = 0;
};

/// Comma-separated numbers; an empty string gives an empty list.
inline std::vector<double> parse_number_list(const std::string& text)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        std::string item = text.substr(pos, end - pos);
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc() || ptr != item.data() + item.size() || !std::isfinite(v)) {
            throw ConfigError("not a number: '" + item + "'");
        }
        out.push_back(v);
        pos = end + 1;
    }
    return out;
}

namespace detail {

inline void write_file(const std::string& path, const std::string& contents)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << contents;
    if (!f) throw ConfigError("cannot write '" + path + "'");
}

/// Runs a command body, mapping exceptions onto the exit-code contract.
inline int guarded(std::ostream& err, const std::function<int()>& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumericalFailure;
    }
}

inline ExperimentConfig prepare(const CommandOptions& opt, int min_steps)
{
    if (opt.config_path.empty()) throw ConfigError("--config is required");
    ExperimentConfig c = load_config(opt.config_path);
    apply_overrides(c, opt.overrides);
    validate(c, min_steps);
    return c;
}

/// Column index of each requested quantity, `defaults` when none are listed.
inline std::vector<std::size_t> select_columns(const std::vector<std::string>& columns,
                                               const std::vector<std::string>& requested,
                                               const std::vector<std::string>& defaults)
{
    const auto& names = requested.empty() ? defaults : requested;
    std::vector<std::size_t> idx;
    for (const auto& q : names) {
        const auto it = std::find(columns.begin(), columns.end(), q);
        if (it == columns.end()) throw ConfigError("unknown quantity '" + q + "'");
        idx.push_back(static_cast<std::size_t>(it - columns.begin()));
    }
    return idx;
}

/// Table of rows (first column is x) rendered as one series per selected column.
inline std::string plot_columns(const std::string& title, const std::string& x_label,
                                const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows,
                                const std::vector<std::size_t>& selected)
{
    std::vector<io::Series> series;
    for (std::size_t c : selected) {
        io::Series s{columns[c], {}, {}};
        for (const auto& r : rows) {
            s.x.push_back(r[0]);
            s.y.push_back(r[c]);
        }
        series.push_back(std::move(s));
    }
    io::PlotSpec spec;
    spec.title = title;
    spec.x_label = x_label;
    return io::render_svg(spec, series);
}

inline std::string summary(const ExperimentConfig& c, const Trajectory& traj)
{
    long long total = 0;
    int max_iters = 0;
    double max_res = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        total += traj.newton_iterations[k];
        max_iters = std::max(max_iters, traj.newton_iterations[k]);
        max_res = std::max(max_res, traj.newton_residual[k]);
    }
    std::ostringstream s;
    s << "integrator=" << c.integrator << " h=" << io::format_double(c.h) << " steps=" << c.steps
      << " rows=" << traj.size() << '\n';
    s << "max_abs_H_drift=" << io::format_double(traj.empty() ? 0.0 : traj.max_energy_drift()) << '\n';
    s << "min_dS=" << io::format_double(traj.size() < 2 ? 0.0 : traj.min_entropy_increment()) << '\n';
    s << "newton_iterations_total=" << total << " newton_iterations_max=" << max_iters
      << " newton_residual_max=" << io::format_double(max_res) << '\n';
    return s.str();
}

struct RunOutcome {
    Trajectory trajectory;
    std::optional<int> failed_step;
    std::string failure;
};

inline RunOutcome run_guarded(StepperKind kind, const PolynomialSystem& sys, const StepperConfig& cfg,
                              const InitialCondition& init, int steps, const ReferenceTolerances& tol)
{
    RunOutcome r;
    try {
        r.trajectory = run_stepper(kind, sys, cfg, init, steps, tol);
    } catch (const IntegrationFailure& e) {
        r.trajectory = e.partial();
        r.failed_step = e.step();
        r.failure = e.what();
    }
    return r;
}

inline std::string sanitize_status(std::string s)
{
    for (char& ch : s) {
        if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
    }
    return s;
}

} // namespace detail

/// Runs the configured integrator and writes the trajectory CSV (standard
/// output when no csv path is configured) and any requested SVG plots.
inline int cmd_simulate(const CommandOptions& opt, std::ostream& out, std::ostream& err)
{
    return detail::guarded(err, [&] {
        const ExperimentConfig c = detail::prepare(opt, 1);
        const PolynomialSystem sys = c.system.build();
        const std::vector<std::string> columns = [&] {
            auto cols = io::trajectory_columns(c.system.dimension);
            cols.erase(cols.begin()); // step
            return cols;
        }();
        std::vector<std::string> defaults = io::state_columns(c.system.dimension);
        defaults.push_back("H");
        std::vector<std::vector<std::size_t>> selections;
        for (const auto& o : c.outputs) selections.push_back(detail::select_columns(columns, o.quantities, defaults));

        const detail::RunOutcome run = detail::run_guarded(c.kind(), sys, c.stepper_config(), c.initial_condition(),
                                                           c.steps, c.reference);

        std::ostringstream csv;
        io::write_trajectory(csv, run.trajectory);
        if (run.failed_step) io::write_failure_trailer(csv, *run.failed_step);

        bool csv_to_stdout = true;
        for (std::size_t k = 0; k < c.outputs.size(); ++k) {
            const OutputSpec& o = c.outputs[k];
            if (!o.csv.empty()) {
                detail::write_file(o.csv, csv.str());
                csv_to_stdout = false;
            }
            if (!o.svg.empty()) {
                std::vector<std::vector<double>> rows;
                for (std::size_t i = 0; i < run.trajectory.size(); ++i) rows.push_back(io::trajectory_row(run.trajectory, i));
                detail::write_file(o.svg, detail::plot_columns(c.integrator, "t", columns, rows, selections[k]));
            }
        }
        if (csv_to_stdout) out << csv.str();
        (csv_to_stdout ? err : out) << detail::summary(c, run.trajectory);

        if (run.failed_step) {
            err << "failed at step " << *run.failed_step << ": " << run.failure << '\n';
            return int(kExitNumericalFailure);
        }
        return int(kExitOk);
    });
}

/// Integrator against the reference solution at matched times:
/// `step,t,err_q,err_p,err_S,err_H` with max-norm errors over components.
inline int cmd_compare(const CommandOptions& opt, std::ostream& out, std::ostream& err)
{
    return detail::guarded(err, [&] {
        const ExperimentConfig c = detail::prepare(opt, 0);
        const PolynomialSystem sys = c.system.build();
        const std::vector<std::string> columns = {"t", "err_q", "err_p", "err_S", "err_H"};
        const std::vector<std::string> defaults = {"err_q", "err_p", "err_S", "err_H"};
        std::vector<std::vector<std::size_t>> selections;
        for (const auto& o : c.outputs) selections.push_back(detail::select_columns(columns, o.quantities, defaults));

        const detail::RunOutcome run = detail::run_guarded(c.kind(), sys, c.stepper_config(), c.initial_condition(),
                                                           c.steps, c.reference);
        const detail::RunOutcome ref = detail::run_guarded(StepperKind::Reference, sys, c.stepper_config(),
                                                           c.initial_point(), c.steps, c.reference);

        const std::size_t rows_n = std::min(run.trajectory.size(), ref.trajectory.size());
        std::vector<std::vector<double>> rows;
        for (std::size_t k = 0; k < rows_n; ++k) {
            const ContactPoint& a = run.trajectory.states[k];
            const ContactPoint& b = ref.trajectory.states[k];
            rows.push_back({run.trajectory.times[k], (a.q - b.q).lpNorm<Eigen::Infinity>(),
                            (a.p - b.p).lpNorm<Eigen::Infinity>(), std::abs(a.S - b.S),
                            std::abs(run.trajectory.energy[k] - ref.trajectory.energy[k])});
        }
        std::optional<int> failed;
        std::string reason;
        if (run.failed_step) {
            failed = *run.failed_step;
            reason = run.failure;
        }
        if (ref.failed_step && (!failed || *ref.failed_step < *failed)) {
            failed = *ref.failed_step;
            reason = "reference: " + ref.failure;
        }

        std::ostringstream csv;
        io::write_header(csv, {"step", "t", "err_q", "err_p", "err_S", "err_H"});
        for (std::size_t k = 0; k < rows.size(); ++k) io::write_row(csv, static_cast<long long>(k), rows[k]);
        if (failed) io::write_failure_trailer(csv, *failed);

        bool csv_to_stdout = true;
        for (std::size_t k = 0; k < c.outputs.size(); ++k) {
            const OutputSpec& o = c.outputs[k];
            if (!o.csv.empty()) {
                detail::write_file(o.csv, csv.str());
                csv_to_stdout = false;
            }
            if (!o.svg.empty()) {
                detail::write_file(o.svg, detail::plot_columns(c.integrator + " error", "t", columns, rows, selections[k]));
            }
            if (!o.energy_svg.empty()) {
                io::Series mine{"H " + c.integrator, {}, {}};
                io::Series exact{"H reference", {}, {}};
                for (std::size_t i = 0; i < rows_n; ++i) {
                    mine.x.push_back(static_cast<double>(i));
                    mine.y.push_back(run.trajectory.energy[i]);
                    exact.x.push_back(static_cast<double>(i));
                    exact.y.push_back(ref.trajectory.energy[i]);
                }
                io::PlotSpec spec;
                spec.title = "H along the iterations";
                spec.x_label = "step";
                detail::write_file(o.energy_svg, io::render_svg(spec, {mine, exact}));
            }
        }
        if (csv_to_stdout) out << csv.str();

        if (failed) {
            err << "failed at step " << *failed << ": " << reason << '\n';
            return int(kExitNumericalFailure);
        }
        return int(kExitOk);
    });
}

/// Runs an invariant suite and prints one line per check.
inline int cmd_check(const CommandOptions& opt, std::ostream& out, std::ostream& err)
{
    return detail::guarded(err, [&] {
        std::uint64_t seed = 42;
        if (!opt.config_path.empty()) seed = load_config(opt.config_path).seed;
        if (opt.overrides.seed) seed = *opt.overrides.seed;
        const std::string suite = opt.suite.empty() ? "all" : opt.suite;
        if (std::find(checks::kSuiteNames.begin(), checks::kSuiteNames.end(), suite) == checks::kSuiteNames.end()) {
            throw ConfigError("unknown suite '" + suite + "'");
        }
        const checks::Report report = checks::run_suite(suite, seed);
        out << report.text();
        const auto failed = std::count_if(report.results.begin(), report.results.end(),
                                          [](const checks::CheckResult& r) { return !r.passed; });
        err << report.results.size() << " checks, " << failed << " failed\n";
        return report.passed() ? int(kExitOk) : int(kExitInvariantFailure);
    });
}

struct SweepCell {
    double h = 0.0;
    double gamma = 0.0;
    double max_abs_H_drift = std::numeric_limits<double>::quiet_NaN();
    double min_dS = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> order;
    std::string status;
};

namespace detail {

inline SweepCell run_cell(ExperimentConfig c, double h, double gamma, bool order)
{
    SweepCell cell;
    cell.h = h;
    cell.gamma = gamma;
    try {
        c.h = h;
        c.system.gamma = gamma;
        validate(c, 1);
        const PolynomialSystem sys = c.system.build();
        const RunOutcome run = run_guarded(c.kind(), sys, c.stepper_config(), c.initial_condition(), c.steps, c.reference);
        if (run.failed_step) {
            cell.status = sanitize_status("failed at step " + std::to_string(*run.failed_step));
            return cell;
        }
        cell.max_abs_H_drift = run.trajectory.max_energy_drift();
        cell.min_dS = run.trajectory.min_entropy_increment();
        cell.status = "ok";
        if (order && !is_herglotz(c.kind())) {
            try {
                const std::vector<double> hs = {h, h / 2, h / 4};
                const double t_end = c.steps * h;
                cell.order = convergence_order(hs, [&](double hh) {
                    return final_position_error(c.kind(), sys, *c.initial, t_end, hh, c.reference);
                });
            } catch (const std::exception&) {
                cell.order.reset();
            }
        }
    } catch (const std::exception& e) {
        cell.status = sanitize_status(std::string("failed: ") + e.what());
    }
    return cell;
}

} // namespace detail

/// Independent runs over an (h, gamma) grid, h-major. Cells run in parallel;
/// rows are written in grid order.
inline int cmd_sweep(const CommandOptions& opt, std::ostream& out, std::ostream& err)
{
    return detail::guarded(err, [&] {
        ExperimentConfig c = detail::prepare(opt, 1);
        std::vector<double> hs = opt.h_list ? parse_number_list(*opt.h_list)
                                            : c.sweep.h.value_or(std::vector<double>{c.h});
        std::vector<double> gammas = opt.gamma_list ? parse_number_list(*opt.gamma_list)
                                                    : c.sweep.gamma.value_or(std::vector<double>{c.system.gamma});
        const std::size_t cells = hs.size() * gammas.size();
        if (cells == 0) throw ConfigError("empty parameter grid");
        if (cells > kMaxSweepCells) throw ConfigError("parameter grid exceeds " + std::to_string(kMaxSweepCells) + " cells");
        const bool order = opt.order || c.sweep.order;

        std::vector<SweepCell> results(cells);
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < cells; i = next++) {
                results[i] = detail::run_cell(c, hs[i / gammas.size()], gammas[i % gammas.size()], order);
            }
        };
        unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
        threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells));
        std::vector<std::thread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();

        std::ostringstream csv;
        io::write_header(csv, {"h", "gamma", "max_abs_H_drift", "min_dS", "order_estimate", "status"});
        std::size_t failed = 0;
        for (const auto& r : results) {
            const bool ok = r.status == "ok";
            failed += ok ? 0 : 1;
            csv << io::format_double(r.h) << ',' << io::format_double(r.gamma) << ','
                << (ok ? io::format_double(r.max_abs_H_drift) : "") << ',' << (ok ? io::format_double(r.min_dS) : "")
                << ',' << (r.order ? io::format_double(*r.order) : "") << ',' << r.status << '\n';
        }

        const std::string csv_path = c.outputs.empty() ? "" : c.outputs.front().csv;
        const std::string svg_path = c.outputs.empty() ? "" : c.outputs.front().svg;
        if (csv_path.empty()) out << csv.str();
        else detail::write_file(csv_path, csv.str());
        if (!svg_path.empty()) {
            std::vector<io::Series> series;
            for (std::size_t g = 0; g < gammas.size(); ++g) {
                io::Series s{"gamma=" + io::format_double(gammas[g]), {}, {}};
                for (std::size_t i = 0; i < hs.size(); ++i) {
                    const SweepCell& r = results[i * gammas.size() + g];
                    s.x.push_back(r.h);
                    s.y.push_back(r.max_abs_H_drift);
                }
                series.push_back(std::move(s));
            }
            io::PlotSpec spec;
            spec.title = "max |H - H0| over the grid";
            spec.x_label = "h";
            detail::write_file(svg_path, io::render_svg(spec, series));
        }
        err << cells << " cells, " << failed << " failed\n";
        return failed == cells ? int(kExitNumericalFailure) : int(kExitOk);
    });
}

} // namespace thermoflow::cli
