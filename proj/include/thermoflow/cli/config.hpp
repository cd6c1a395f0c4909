#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermoflow/steppers.hpp"

namespace thermoflow::cli {

/// Malformed or inconsistent experiment description (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A system given by name or inline: |p|^2/(2 mass) + V(q, S) + gamma S.
struct SystemSpec {
    std::string name = "damped-oscillator";
    int dimension = 1;
    double mass = 1.0;
    double gamma = 0.0;
    std::vector<Polynomial::Term> potential; // over (q_1..q_n, S), without the gamma S term

    PolynomialSystem build() const
    {
        PolynomialSystem sys{dimension, mass, Polynomial(dimension + 1)};
        for (const auto& t : potential) sys.potential.add_term(t.coefficient, t.exponents);
        std::vector<int> eS(dimension + 1, 0);
        eS[dimension] = 1;
        sys.potential.add_term(gamma, eS);
        return sys;
    }
};

struct OutputSpec {
    std::string csv;
    std::string svg;
    std::string energy_svg; // compare only: H of integrator and reference against step
    std::vector<std::string> quantities;
};

struct SweepSpec {
    std::optional<std::vector<double>> h;
    std::optional<std::vector<double>> gamma;
    bool order = false;
};

struct ExperimentConfig {
    SystemSpec system;
    std::string integrator = "dg-midpoint";
    double h = 0.1;
    int steps = 1000;
    std::optional<ContactPoint> initial;
    std::optional<HerglotzInitial> herglotz_initial;
    std::uint64_t seed = 42;
    std::vector<OutputSpec> outputs;
    ReferenceTolerances reference;
    double newton_tol = 1e-12;
    int max_newton_iters = 50;
    double fd_jacobian_step = 1e-7;
    SweepSpec sweep;

    StepperKind kind() const
    {
        const auto k = parse_stepper_kind(integrator);
        if (!k) throw ConfigError("unknown integrator '" + integrator + "'");
        return *k;
    }

    StepperConfig stepper_config() const
    {
        StepperConfig c;
        c.h = h;
        c.newton_tol = newton_tol;
        c.max_newton_iters = max_newton_iters;
        c.fd_jacobian_step = fd_jacobian_step;
        return c;
    }

    InitialCondition initial_condition() const
    {
        if (is_herglotz(kind())) return *herglotz_initial;
        return *initial;
    }

    /// Starting point of the continuous flow matching initial_condition().
    ContactPoint initial_point() const
    {
        if (!is_herglotz(kind())) return *initial;
        const auto& hi = *herglotz_initial;
        const DiscreteLagrangian ld = discretize_lagrangian_midpoint(system.build().lagrangian(), h);
        return {hi.q0, initial_discrete_momentum(ld, hi.q0, hi.q1, hi.S0), hi.S0};
    }
};

/// Command-line values that take precedence over the file.
struct Overrides {
    std::optional<double> h;
    std::optional<int> steps;
    std::optional<double> gamma;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_csv;
    std::optional<std::string> out_svg;
    std::optional<std::string> integrator;
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where)
{
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

inline double number(const json& j, const std::string& where)
{
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(where + ": must be finite");
    return v;
}

inline int integer(const json& j, const std::string& where)
{
    if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
    const auto v = j.get<long long>();
    if (v < -2147483647LL || v > 2147483647LL) throw ConfigError(where + ": out of range");
    return static_cast<int>(v);
}

inline std::string string(const json& j, const std::string& where)
{
    if (!j.is_string()) throw ConfigError(where + ": expected a string");
    return j.get<std::string>();
}

/// A scalar or an array of numbers.
inline Vec vector(const json& j, const std::string& where)
{
    if (j.is_number()) return Vec::Constant(1, number(j, where));
    if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a number or a non-empty array");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<Eigen::Index>(k)] = number(j[k], where);
    return v;
}

inline std::vector<double> number_list(const json& j, const std::string& where)
{
    if (!j.is_array()) throw ConfigError(where + ": expected an array");
    std::vector<double> out;
    for (const auto& e : j) out.push_back(number(e, where));
    return out;
}

/// Potential terms, either [i, j, c] meaning c q^i S^j (n = 1) or
/// {"q": [i_1..i_n], "S": j, "c": c}.
inline std::vector<Polynomial::Term> potential_terms(const json& j, int n, const std::string& where)
{
    if (!j.is_array()) throw ConfigError(where + ": expected an array of terms");
    std::vector<Polynomial::Term> terms;
    for (const auto& t : j) {
        std::vector<int> e(n + 1, 0);
        double c = 0.0;
        if (t.is_array()) {
            if (n != 1) throw ConfigError(where + ": [i, j, c] terms need dimension 1; use {\"q\", \"S\", \"c\"}");
            if (t.size() != 3) throw ConfigError(where + ": a term is [i, j, c]");
            e[0] = integer(t[0], where);
            e[1] = integer(t[1], where);
            c = number(t[2], where);
        } else if (t.is_object()) {
            check_keys(t, {"q", "S", "c"}, where);
            if (!t.contains("c")) throw ConfigError(where + ": term needs a coefficient 'c'");
            c = number(t["c"], where);
            if (t.contains("q")) {
                const json& q = t["q"];
                if (q.is_number_integer() && n == 1) {
                    e[0] = integer(q, where);
                } else {
                    if (!q.is_array() || static_cast<int>(q.size()) != n) {
                        throw ConfigError(where + ": 'q' exponents must have one entry per dimension");
                    }
                    for (int i = 0; i < n; ++i) e[i] = integer(q[i], where);
                }
            }
            if (t.contains("S")) e[n] = integer(t["S"], where);
        } else {
            throw ConfigError(where + ": a term is [i, j, c] or an object");
        }
        for (int x : e) {
            if (x < 0) throw ConfigError(where + ": exponents must be >= 0");
        }
        terms.push_back({c, std::move(e)});
    }
    return terms;
}

inline std::vector<Polynomial::Term> half_square(int n)
{
    std::vector<Polynomial::Term> terms;
    for (int i = 0; i < n; ++i) {
        std::vector<int> e(n + 1, 0);
        e[i] = 2;
        terms.push_back({0.5, std::move(e)});
    }
    return terms;
}

inline SystemSpec system_spec(const json& j)
{
    SystemSpec s;
    if (j.is_string()) {
        s.name = j.get<std::string>();
        if (s.name != "damped-oscillator" && s.name != "linearly-damped") {
            throw ConfigError("system: unknown system '" + s.name + "'");
        }
        s.potential = half_square(1);
        return s;
    }
    check_keys(j, {"name", "dimension", "mass", "gamma", "potential"}, "system");
    s.name = j.contains("name") ? string(j["name"], "system.name") : "inline";
    if (s.name != "damped-oscillator" && s.name != "linearly-damped" && s.name != "inline") {
        throw ConfigError("system: unknown system '" + s.name + "'");
    }
    if (j.contains("dimension")) s.dimension = integer(j["dimension"], "system.dimension");
    if (s.dimension < 1) throw ConfigError("system.dimension must be >= 1");
    if (j.contains("gamma")) s.gamma = number(j["gamma"], "system.gamma");
    if (s.name == "damped-oscillator") {
        if (j.contains("mass") || j.contains("potential")) {
            throw ConfigError("system: damped-oscillator takes only dimension and gamma");
        }
        s.potential = half_square(s.dimension);
        return s;
    }
    if (j.contains("mass")) s.mass = number(j["mass"], "system.mass");
    if (!(s.mass > 0.0)) throw ConfigError("system.mass must be > 0");
    if (j.contains("potential")) {
        s.potential = potential_terms(j["potential"], s.dimension, "system.potential");
    } else if (s.name == "linearly-damped") {
        s.potential = half_square(s.dimension);
    } else {
        throw ConfigError("system: an inline system needs a 'potential'");
    }
    if (s.name == "linearly-damped") {
        for (const auto& t : s.potential) {
            if (t.exponents.back() != 0) throw ConfigError("system.potential: linearly-damped potentials depend on q only");
        }
    }
    return s;
}

inline OutputSpec output_spec(const json& j)
{
    check_keys(j, {"csv", "svg", "energy_svg", "quantities"}, "outputs");
    OutputSpec o;
    if (j.contains("csv")) o.csv = string(j["csv"], "outputs.csv");
    if (j.contains("svg")) o.svg = string(j["svg"], "outputs.svg");
    if (j.contains("energy_svg")) o.energy_svg = string(j["energy_svg"], "outputs.energy_svg");
    if (j.contains("quantities")) {
        if (!j["quantities"].is_array()) throw ConfigError("outputs.quantities: expected an array");
        for (const auto& q : j["quantities"]) o.quantities.push_back(string(q, "outputs.quantities"));
    }
    return o;
}

} // namespace detail

/// Parses a JSON experiment description. Validation of cross-field
/// invariants is left to validate() so that overrides can apply first.
inline ExperimentConfig parse_config(const std::string& text)
{
    using detail::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    detail::check_keys(j, {"system", "gamma", "integrator", "h", "steps", "initial", "seed", "outputs", "reference",
                           "newton", "sweep"},
                       "config");

    ExperimentConfig c;
    if (j.contains("system")) c.system = detail::system_spec(j["system"]);
    else c.system.potential = detail::half_square(1);
    if (j.contains("gamma")) {
        if (j.contains("system") && j["system"].is_object() && j["system"].contains("gamma")) {
            throw ConfigError("config: gamma given both at top level and in system");
        }
        c.system.gamma = detail::number(j["gamma"], "gamma");
    }
    if (j.contains("integrator")) c.integrator = detail::string(j["integrator"], "integrator");
    if (j.contains("h")) c.h = detail::number(j["h"], "h");
    if (j.contains("steps")) c.steps = detail::integer(j["steps"], "steps");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("initial")) {
        const json& in = j["initial"];
        detail::check_keys(in, {"q", "p", "S", "q0", "q1", "S0"}, "initial");
        const bool ham = in.contains("q") || in.contains("p") || in.contains("S");
        const bool her = in.contains("q0") || in.contains("q1") || in.contains("S0");
        if (ham && her) throw ConfigError("initial: give either (q, p, S) or (q0, q1, S0)");
        if (ham) {
            if (!in.contains("q") || !in.contains("p")) throw ConfigError("initial: (q, p, S) needs q and p");
            const double S = in.contains("S") ? detail::number(in["S"], "initial.S") : 0.0;
            c.initial = ContactPoint(detail::vector(in["q"], "initial.q"), detail::vector(in["p"], "initial.p"), S);
        } else if (her) {
            if (!in.contains("q0") || !in.contains("q1")) throw ConfigError("initial: (q0, q1, S0) needs q0 and q1");
            const double S0 = in.contains("S0") ? detail::number(in["S0"], "initial.S0") : 0.0;
            c.herglotz_initial =
                HerglotzInitial{detail::vector(in["q0"], "initial.q0"), detail::vector(in["q1"], "initial.q1"), S0};
        }
    }
    if (j.contains("outputs")) {
        if (!j["outputs"].is_array()) throw ConfigError("outputs: expected an array");
        for (const auto& o : j["outputs"]) c.outputs.push_back(detail::output_spec(o));
    }
    if (j.contains("reference")) {
        detail::check_keys(j["reference"], {"rtol", "atol"}, "reference");
        if (j["reference"].contains("rtol")) c.reference.rtol = detail::number(j["reference"]["rtol"], "reference.rtol");
        if (j["reference"].contains("atol")) c.reference.atol = detail::number(j["reference"]["atol"], "reference.atol");
    }
    if (j.contains("newton")) {
        const json& nw = j["newton"];
        detail::check_keys(nw, {"tol", "max_iterations", "fd_step"}, "newton");
        if (nw.contains("tol")) c.newton_tol = detail::number(nw["tol"], "newton.tol");
        if (nw.contains("max_iterations")) c.max_newton_iters = detail::integer(nw["max_iterations"], "newton.max_iterations");
        if (nw.contains("fd_step")) c.fd_jacobian_step = detail::number(nw["fd_step"], "newton.fd_step");
    }
    if (j.contains("sweep")) {
        const json& sw = j["sweep"];
        detail::check_keys(sw, {"h", "gamma", "order"}, "sweep");
        if (sw.contains("h")) c.sweep.h = detail::number_list(sw["h"], "sweep.h");
        if (sw.contains("gamma")) c.sweep.gamma = detail::number_list(sw["gamma"], "sweep.gamma");
        if (sw.contains("order")) {
            if (!sw["order"].is_boolean()) throw ConfigError("sweep.order: expected true or false");
            c.sweep.order = sw["order"].get<bool>();
        }
    }
    return c;
}

inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

inline void apply_overrides(ExperimentConfig& c, const Overrides& o)
{
    if (o.h) c.h = *o.h;
    if (o.steps) c.steps = *o.steps;
    if (o.gamma) c.system.gamma = *o.gamma;
    if (o.seed) c.seed = *o.seed;
    if (o.integrator) c.integrator = *o.integrator;
    if (o.out_csv || o.out_svg) {
        if (c.outputs.empty()) c.outputs.emplace_back();
        if (o.out_csv) c.outputs.front().csv = *o.out_csv;
        if (o.out_svg) c.outputs.front().svg = *o.out_svg;
    }
}

/// Cross-field checks. `min_steps` is 1 for simulate and 0 for compare.
inline void validate(const ExperimentConfig& c, int min_steps = 1)
{
    if (!(c.h > 0.0) || !std::isfinite(c.h)) throw ConfigError("h must be > 0");
    if (c.steps < min_steps) throw ConfigError("steps must be >= " + std::to_string(min_steps));
    if (!std::isfinite(c.system.gamma)) throw ConfigError("gamma must be finite");
    const StepperKind k = c.kind();
    const int n = c.system.dimension;
    if (is_herglotz(k)) {
        if (!c.herglotz_initial) throw ConfigError(c.integrator + " needs initial (q0, q1, S0)");
        if (c.herglotz_initial->q0.size() != n || c.herglotz_initial->q1.size() != n) {
            throw ConfigError("initial: q0 and q1 must have " + std::to_string(n) + " entries");
        }
    } else {
        if (!c.initial) throw ConfigError(c.integrator + " needs initial (q, p, S)");
        if (c.initial->q.size() != n || c.initial->p.size() != n) {
            throw ConfigError("initial: q and p must have " + std::to_string(n) + " entries");
        }
    }
    if (needs_damped_oscillator(k) && !damped_oscillator_gamma(c.system.build())) {
        throw ConfigError(c.integrator + " requires the one-dimensional damped oscillator");
    }
    if (!(c.reference.rtol > 0.0) || !(c.reference.atol > 0.0)) throw ConfigError("reference tolerances must be > 0");
    if (!(c.newton_tol > 0.0) || c.max_newton_iters < 1 || !(c.fd_jacobian_step > 0.0)) {
        throw ConfigError("newton settings must be positive");
    }
}

} // namespace thermoflow::cli
