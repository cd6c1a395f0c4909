// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "thermoflow/checks.hpp"
#include "thermoflow/numdiff.hpp"
#include "thermoflow/steppers.hpp"

using namespace thermoflow;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;

    void require(bool ok, const std::string& what, double value)
    {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s%s=%.3e%s", detail.empty() ? "" : " ", what.c_str(), value, ok ? "" : "(!)");
        detail += buf;
        passed = passed && ok;
    }
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

StepperConfig cfg(double h)
{
    StepperConfig c;
    c.h = h;
    return c;
}

Outcome closed_form_reproduction()
{
    Outcome o;
    const ContactPoint x0(0.0, 10.0, 0.0);
    const StepResult cf = dg_harmonic_closed_form_step(0.1, cfg(0.1), x0);
    o.require(rel(cf.state.q[0], 4.0 / 4.03) <= 1e-12, "q1_rel", rel(cf.state.q[0], 4.0 / 4.03));
    o.require(rel(cf.state.p[0], 39.7 / 4.03) <= 1e-12, "p1_rel", rel(cf.state.p[0], 39.7 / 4.03));
    o.require(rel(cf.state.S, 160.0 / 16.2409) <= 1e-12, "S1_rel", rel(cf.state.S, 160.0 / 16.2409));
    const StepResult g = dg_step(damped_oscillator_system(0.1).hamiltonian(), DiscreteGradientRule::midpoint(), cfg(0.1), x0);
    const double d = (g.state.to_vector() - cf.state.to_vector()).lpNorm<Eigen::Infinity>();
    o.require(d <= 1e-10, "generic_vs_closed", d);
    return o;
}

const Trajectory& midpoint_run()
{
    static const Trajectory t =
        run_stepper(StepperKind::DgMidpoint, damped_oscillator_system(0.1), cfg(0.1), ContactPoint(0.0, 10.0, 0.0), 10000);
    return t;
}

Outcome energy_conservation()
{
    Outcome o;
    const Trajectory& mid = midpoint_run();
    double drift = 0.0;
    for (double e : mid.energy) drift = std::max(drift, std::abs(e - 50.0));
    o.require(drift <= 1e-7, "midpoint_drift", drift);
    const Trajectory cf = run_stepper(StepperKind::DgHarmonicExact, damped_oscillator_system(0.1), cfg(0.1),
                                      ContactPoint(0.0, 10.0, 0.0), 10000);
    double cf_drift = 0.0;
    for (double e : cf.energy) cf_drift = std::max(cf_drift, std::abs(e - 50.0));
    o.require(cf_drift <= 1e-10, "closed_form_drift", cf_drift);
    return o;
}

Outcome entropy_monotonicity()
{
    Outcome o;
    const double min_dS = midpoint_run().min_entropy_increment();
    o.require(min_dS >= -1e-10, "midpoint_min_dS", min_dS);
    const Trajectory ref = run_stepper(StepperKind::Reference, damped_oscillator_system(0.1), cfg(0.1),
                                       ContactPoint(0.0, 10.0, 0.0), 10000);
    const double ref_min = ref.min_entropy_increment();
    o.require(ref_min >= 0.0, "reference_min_dS", ref_min);
    return o;
}

Outcome herglotz_reproduction()
{
    Outcome o;
    const HerglotzStepResult cf = herglotz_harmonic_closed_form_step(0.1, cfg(0.1), 0.0, 1.0, 0.0);
    o.require(rel(cf.q_next[0], 7.9401 / 4.01) <= 1e-12, "q2_rel", rel(cf.q_next[0], 7.9401 / 4.01));
    o.require(rel(cf.S_curr, 9.975) <= 1e-12, "S1_rel", rel(cf.S_curr, 9.975));

    const PolynomialSystem osc = damped_oscillator_system(0.1);
    const HerglotzInitial init{Vec::Constant(1, 0.0), Vec::Constant(1, 1.0), 0.0};
    const Trajectory generic = run_stepper(StepperKind::Herglotz, osc, cfg(0.1), init, 1000);
    const Trajectory exact = run_stepper(StepperKind::HerglotzHarmonicExact, osc, cfg(0.1), init, 1000);
    double d = 0.0;
    for (std::size_t k = 0; k < exact.size(); ++k) {
        d = std::max(d, std::abs(generic.states[k].q[0] - exact.states[k].q[0]));
        d = std::max(d, std::abs(generic.states[k].S - exact.states[k].S));
    }
    o.require(d <= 1e-10, "generic_vs_closed", d);

    const double min_dS = exact.min_entropy_increment();
    o.require(min_dS >= 0.0, "min_dS", min_dS);

    const double early = checks::detail::oscillation(exact.energy, 0, 500);
    const double late = checks::detail::oscillation(exact.energy, 500, 1000);
    o.require(late <= early, "H_osc_late_over_early", late / early);
    return o;
}

Outcome checks_passed(const checks::Report& r, const std::string& prefix = "")
{
    Outcome o;
    int failed = 0;
    int considered = 0;
    for (const auto& c : r.results) {
        if (c.name.rfind(prefix, 0) != 0) continue;
        ++considered;
        if (!c.passed) {
            ++failed;
            o.detail += (o.detail.empty() ? "" : " ") + c.name + "(!)";
        }
    }
    o.passed = failed == 0 && considered > 0;
    o.detail = std::to_string(considered - failed) + "/" + std::to_string(considered) + " checks pass" +
               (o.detail.empty() ? "" : ": " + o.detail);
    return o;
}

Outcome discrete_gradient_axioms() { return checks_passed(checks::gradients_suite(THERMOFLOW_TEST_SEED)); }

Outcome geometry_identities() { return checks_passed(checks::geometry_suite(THERMOFLOW_TEST_SEED)); }

Outcome convergence_orders()
{
    Outcome o;
    const PolynomialSystem osc = damped_oscillator_system(0.1);
    const ContactPoint x0(0.0, 10.0, 0.0);
    const ReferenceTolerances tol{1e-10, 1e-12};
    const std::vector<double> hs = {0.1, 0.05, 0.025, 0.0125};
    auto order = [&](StepperKind kind) {
        return convergence_order(hs, [&](double h) { return final_position_error(kind, osc, x0, 10.0, h, tol); });
    };
    const double mid = order(StepperKind::DgMidpoint);
    o.require(mid >= 1.7 && mid <= 2.3, "dg_midpoint", mid);
    const double her = order(StepperKind::Herglotz);
    o.require(her >= 1.5 && her <= 2.5, "herglotz", her);
    const double eul = order(StepperKind::Euler);
    o.require(eul >= 0.8 && eul <= 1.2, "euler", eul);
    return o;
}

Outcome legendre_relatedness()
{
    Outcome o;
    PolynomialSystem sys{2, 1.3, Polynomial(3)};
    sys.potential.add_term(0.5, {2, 0, 0}).add_term(0.5, {0, 2, 0}).add_term(0.1, {2, 2, 0}).add_term(0.2, {0, 0, 1});
    const ContactLagrangian L = sys.lagrangian();
    const ScalarField H = sys.hamiltonian();
    const ContactStructure cs(2);
    auto fl = [&L](const Vec& y) { return legendre_transform(L, TangentState::from_vector(y)).to_vector(); };
    checks::Sampler s(THERMOFLOW_TEST_SEED, 900);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const TangentState ts(s.vector(2, -1.5, 1.5), s.vector(2, -1.5, 1.5), s.uniform(-1.0, 1.0));
        const Vec pushed = numdiff::jacobian(fl, ts.to_vector()) * herglotz_rhs(L, ts).to_vector();
        const Vec target = cs.evolution_field(H, legendre_transform(L, ts)).to_vector();
        worst = std::max(worst, (pushed - target).lpNorm<Eigen::Infinity>() / std::max(1.0, target.lpNorm<Eigen::Infinity>()));
    }
    o.require(worst <= 1e-8, "max_rel_err", worst);
    return o;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism()
{
    Outcome o;
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "thermoflow_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cli = THERMOFLOW_CLI_PATH;
    const std::string cfg_path = std::string(THERMOFLOW_CONFIG_DIR) + "/damped_oscillator_dg.json";
    for (int k = 0; k < 2; ++k) {
        const std::string tag = std::to_string(k);
        const std::string sim = "\"" + cli + "\" simulate --config \"" + cfg_path + "\" --out-csv \"" +
                                (dir / ("sim" + tag + ".csv")).string() + "\" --out-svg \"" +
                                (dir / ("sim" + tag + ".svg")).string() + "\" > \"" + (dir / ("sim" + tag + ".out")).string() +
                                "\"";
        const std::string chk = "\"" + cli + "\" check all --seed 42 > \"" + (dir / ("check" + tag + ".out")).string() +
                                "\" 2>/dev/null";
        if (std::system(sim.c_str()) != 0) o.require(false, "simulate_exit", 1);
        const int check_status = std::system(chk.c_str()); // reflects invariant results, not determinism
        (void)check_status;
    }
    const bool csv = !slurp(dir / "sim0.csv").empty() && slurp(dir / "sim0.csv") == slurp(dir / "sim1.csv");
    const bool svg = slurp(dir / "sim0.svg") == slurp(dir / "sim1.svg");
    const bool out = slurp(dir / "sim0.out") == slurp(dir / "sim1.out");
    const bool chk = !slurp(dir / "check0.out").empty() && slurp(dir / "check0.out") == slurp(dir / "check1.out");
    o.require(csv && svg && out, "simulate_identical", csv && svg && out ? 1.0 : 0.0);
    o.require(chk, "check_identical", chk ? 1.0 : 0.0);
    fs::remove_all(dir);
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

} // namespace

int main()
{
    const std::vector<Criterion> criteria = {
        {1, "closed_form_reproduction", 1.0, closed_form_reproduction},
        {2, "exact_energy_conservation", 10.0, energy_conservation},
        {3, "entropy_monotonicity", 10.0, entropy_monotonicity},
        {4, "herglotz_reproduction", 10.0, herglotz_reproduction},
        {5, "discrete_gradient_axioms", 5.0, discrete_gradient_axioms},
        {6, "geometry_identity_suite", 5.0, geometry_identities},
        {7, "convergence_order", 30.0, convergence_orders},
        {8, "legendre_relatedness", 1.0, legendre_relatedness},
        {9, "determinism", 60.0, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.passed = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_seconds;
        const bool ok = o.passed && in_time;
        failures += ok ? 0 : 1;
        std::printf("criterion %d %-28s %s  [%s; %.2fs of %.0fs]\n", c.id, c.name, ok ? "PASS" : "FAIL", o.detail.c_str(),
                    secs, c.budget_seconds);
    }
    std::fflush(stdout);
    return failures == 0 ? 0 : 1;
}
