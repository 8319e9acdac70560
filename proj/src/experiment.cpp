#include "mplab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mplab/symcoeffs.hpp"
#include "mplab/verify.hpp"

namespace mplab {

ConfigError::ConfigError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? fmt::format("line {}: {}", line, what) : what), line_(line)
{
}

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<double> parse_numbers(const std::string& text, int line, const std::string& key)
{
    std::istringstream in(text);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size())
            throw ConfigError(line, fmt::format("'{}' expects numbers, got '{}'", key, tok));
        out.push_back(v);
    }
    return out;
}

double parse_number(const std::string& text, int line, const std::string& key)
{
    const auto v = parse_numbers(text, line, key);
    if (v.size() != 1)
        throw ConfigError(line, fmt::format("'{}' expects one number", key));
    return v[0];
}

int parse_int(const std::string& text, int line, const std::string& key)
{
    const double v = parse_number(text, line, key);
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw ConfigError(line, fmt::format("'{}' expects an integer", key));
    return static_cast<int>(v);
}

Point parse_point(const std::string& text, int line, const std::string& key)
{
    const auto v = parse_numbers(text, line, key);
    if (v.size() != 2)
        throw ConfigError(line, fmt::format("'{}' expects two numbers", key));
    return {v[0], v[1]};
}

bool parse_bool(const std::string& text, int line, const std::string& key)
{
    if (text == "true" || text == "yes" || text == "on" || text == "1")
        return true;
    if (text == "false" || text == "no" || text == "off" || text == "0")
        return false;
    throw ConfigError(line, fmt::format("'{}' expects true or false, got '{}'", key, text));
}

}  // namespace

ExperimentConfig parse_config(std::istream& in)
{
    ExperimentConfig cfg;
    std::string section;
    std::set<std::string> seen;
    std::optional<bool> explicit_control;
    std::string raw;
    int line_no = 0;

    using Handler = std::function<void(const std::string&, int)>;
    const std::map<std::string, Handler> handlers = {
        {"domain.shape",
         [&](const std::string& v, int l) {
             try {
                 cfg.domain.shape = parse_shape(v);
             } catch (const std::invalid_argument& e) {
                 throw ConfigError(l, e.what());
             }
         }},
        {"domain.radius", [&](const std::string& v, int l) { cfg.domain.radius = parse_number(v, l, "radius"); }},
        {"domain.center", [&](const std::string& v, int l) { cfg.domain.center = parse_point(v, l, "center"); }},
        {"domain.semi_axes",
         [&](const std::string& v, int l) {
             const Point p = parse_point(v, l, "semi_axes");
             cfg.domain.semi_axis_x = p.x1;
             cfg.domain.semi_axis_y = p.x2;
         }},
        {"domain.half_length", [&](const std::string& v, int l) { cfg.domain.half_length = parse_number(v, l, "half_length"); }},
        {"domain.cap_radius", [&](const std::string& v, int l) { cfg.domain.cap_radius = parse_number(v, l, "cap_radius"); }},
        {"domain.lens_offset", [&](const std::string& v, int l) { cfg.domain.lens_offset = parse_number(v, l, "lens_offset"); }},
        {"domain.singular_point",
         [&](const std::string& v, int l) { cfg.domain.singular_point = parse_point(v, l, "singular_point"); }},
        {"domain.negative_control",
         [&](const std::string& v, int l) { explicit_control = parse_bool(v, l, "negative_control"); }},
        {"problem.m", [&](const std::string& v, int l) { cfg.m = parse_int(v, l, "m"); }},
        {"problem.alpha", [&](const std::string& v, int l) { cfg.alpha = parse_numbers(v, l, "alpha"); }},
        {"problem.f",
         [&](const std::string& v, int l) {
             try {
                 cfg.f = NonlinearitySpec::parse(v);
             } catch (const std::invalid_argument& e) {
                 throw ConfigError(l, e.what());
             }
         }},
        {"grid.n_cells", [&](const std::string& v, int l) { cfg.n_cells = parse_int(v, l, "n_cells"); }},
        {"solve.picard_tol", [&](const std::string& v, int l) { cfg.solve.picard_tol = parse_number(v, l, "picard_tol"); }},
        {"solve.picard_max_iter",
         [&](const std::string& v, int l) { cfg.solve.picard_max_iter = parse_int(v, l, "picard_max_iter"); }},
        {"solve.omega", [&](const std::string& v, int l) { cfg.solve.omega = parse_number(v, l, "omega"); }},
        {"solve.cg_tol", [&](const std::string& v, int l) { cfg.solve.cg_tol = parse_number(v, l, "cg_tol"); }},
        {"solve.cg_max_iter", [&](const std::string& v, int l) { cfg.solve.cg_max_iter = parse_int(v, l, "cg_max_iter"); }},
        {"verify.sweep", [&](const std::string& v, int l) { cfg.sweep = parse_bool(v, l, "sweep"); }},
        {"verify.tol", [&](const std::string& v, int l) { cfg.sweep_tol = parse_number(v, l, "tol"); }},
        {"verify.barrier",
         [&](const std::string& v, int l) {
             if (v == "false" || v == "off" || v == "no") {
                 cfg.barrier.reset();
                 return;
             }
             const auto p = parse_numbers(v, l, "barrier");
             if (p.size() != 3)
                 throw ConfigError(l, "'barrier' expects three numbers: a r K");
             cfg.barrier = BarrierOptions{p[0], p[1], p[2]};
         }},
        {"verify.singular", [&](const std::string& v, int l) { cfg.singular = parse_bool(v, l, "singular"); }},
        {"output.dir", [&](const std::string& v, int) { cfg.output_dir = v; }},
    };

    while (std::getline(in, raw)) {
        ++line_no;
        std::string text = raw;
        if (const auto hash = text.find('#'); hash != std::string::npos)
            text.erase(hash);
        text = trim(text);
        if (text.empty())
            continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                throw ConfigError(line_no, "unterminated section header");
            section = trim(text.substr(1, text.size() - 2));
            static const std::set<std::string> known = {"domain", "problem", "grid", "solve", "verify",
                                                         "output"};
            if (!known.contains(section))
                throw ConfigError(line_no, fmt::format("unknown section [{}]", section));
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line_no, "expected 'key = value'");
        if (section.empty())
            throw ConfigError(line_no, "key outside of any [section]");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        const std::string full = section + "." + key;
        const auto h = handlers.find(full);
        if (h == handlers.end())
            throw ConfigError(line_no, fmt::format("unknown key '{}' in [{}]", key, section));
        if (!seen.insert(full).second)
            throw ConfigError(line_no, fmt::format("duplicate key '{}' in [{}]", key, section));
        if (value.empty())
            throw ConfigError(line_no, fmt::format("key '{}' has no value", key));
        h->second(value, line_no);
    }

    for (const char* required : {"domain.shape", "problem.m", "problem.alpha", "problem.f", "grid.n_cells"}) {
        if (!seen.contains(required)) {
            const std::string r = required;
            const auto dot = r.find('.');
            throw ConfigError(0, fmt::format("missing required key '{}' in [{}]", r.substr(dot + 1),
                                             r.substr(0, dot)));
        }
    }
    if (cfg.m < 1)
        throw ConfigError(0, fmt::format("m must be at least 1 (got {})", cfg.m));
    if (cfg.alpha.size() != static_cast<std::size_t>(cfg.m))
        throw ConfigError(0, fmt::format("alpha has {} entries but m = {}", cfg.alpha.size(), cfg.m));
    if (cfg.n_cells < 8)
        throw ConfigError(0, fmt::format("n_cells must be at least 8 (got {})", cfg.n_cells));
    cfg.negative_control = explicit_control.value_or(cfg.domain.negative_control());
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(0, fmt::format("cannot read config file '{}'", path.string()));
    return parse_config(in);
}

bool F1Report::passed() const
{
    return std::ranges::all_of(clauses, [](const F1Clause& c) { return c.passed; });
}

std::optional<std::string> F1Report::first_failure() const
{
    for (const auto& c : clauses) {
        if (!c.passed)
            return c.name + ": " + c.detail;
    }
    return std::nullopt;
}

F1Report check_f1(const NonlinearitySpec& f)
{
    F1Report rep;
    rep.lipschitz = f.lipschitz();
    const bool finite_params = std::isfinite(f.a) && std::isfinite(f.b) && std::isfinite(f.cap);
    rep.clauses.push_back({"lipschitz", finite_params,
                           finite_params ? fmt::format("L = {}", rep.lipschitz)
                                         : std::string("non-finite parameter")});
    const double f0 = f(0.0);
    rep.clauses.push_back({"f(0) >= 0", f0 >= 0.0, fmt::format("f(0) = {}", f0)});
    const bool monotone = f.kind == NonlinearitySpec::Kind::constant || f.b >= 0.0;
    rep.clauses.push_back({"nondecreasing", monotone,
                           monotone ? std::string("slope factor >= 0")
                                    : fmt::format("slope factor b = {} < 0", f.b)});
    return rep;
}

namespace {

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::filesystem::filesystem_error("cannot open for writing", path,
                                                std::make_error_code(std::errc::permission_denied));
    body(out);
    if (!out)
        throw std::filesystem::filesystem_error("write failed", path,
                                                std::make_error_code(std::errc::io_error));
}

std::string join(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k)
        s += (k ? " " : "") + fmt::format("{}", v[k]);
    return s;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, std::ostream* log)
{
    namespace fs = std::filesystem;
    ExperimentOutcome outcome;
    std::ostringstream report;
    const auto note = [&](const std::string& line) {
        if (log)
            *log << line << '\n';
    };

    try {
        fs::create_directories(cfg.output_dir / "plotdata");
    } catch (const fs::filesystem_error& e) {
        outcome.exit_status = 3;
        outcome.summary = fmt::format("cannot create output directory: {}", e.what());
        note(outcome.summary);
        return outcome;
    }

    const auto finish = [&](int status, const std::string& summary) {
        outcome.exit_status = status;
        outcome.summary = summary;
        fmt::print(report, "result.exit_status = {}\nresult.summary = {}\n", status, summary);
        try {
            write_file(cfg.output_dir / "report.txt", [&](std::ostream& os) { os << report.str(); });
        } catch (const fs::filesystem_error& e) {
            outcome.exit_status = 3;
            outcome.summary = e.what();
        }
        note(outcome.summary);
        return outcome;
    };

    fmt::print(report, "config.shape = {}\n", to_string(cfg.domain.shape));
    fmt::print(report, "config.m = {}\nconfig.alpha = {}\nconfig.f = {}\nconfig.n_cells = {}\n", cfg.m,
               join(cfg.alpha), cfg.f.describe(), cfg.n_cells);
    fmt::print(report, "config.negative_control = {}\n", cfg.negative_control);

    // Structural checks come before any solve.
    const DomainValidation validation = validate_domain(cfg.domain);
    for (const auto& c : validation.checks)
        fmt::print(report, "domain.{} = {} ({})\n", c.name, c.passed ? "pass" : "fail", c.detail);
    if (!validation.all_passed() && !cfg.negative_control)
        return finish(1, "domain violates a structural assumption");

    std::optional<AlphaVector> alpha;
    try {
        alpha.emplace(cfg.alpha);
    } catch (const std::invalid_argument& e) {
        return finish(2, e.what());
    }
    const SymCoeffs s = expand_characteristic(*alpha);
    const bool signs = all_nonnegative_signs(*alpha);
    fmt::print(report, "signs.coefficients = {}\n", join(s.coeffs));
    fmt::print(report, "signs.hypothesis_range = s_0..s_{}\n", cfg.m - 1);
    fmt::print(report, "signs.all_coefficients_nonnegative = {}\n", signs);
    fmt::print(report, "signs.all_shifts_nonnegative = {}\n", alpha->all_nonnegative());
    fmt::print(report, "signs.equivalence_holds = {}\n", signs == alpha->all_nonnegative());
    if (!signs)
        return finish(1, "shift coefficients violate the sign hypothesis");

    const F1Report f1 = check_f1(cfg.f);
    for (const auto& c : f1.clauses)
        fmt::print(report, "f1.{} = {} ({})\n", c.name, c.passed ? "pass" : "fail", c.detail);
    if (!f1.passed())
        return finish(1, "nonlinearity violates (f1) clause " + *f1.first_failure());

    std::shared_ptr<const Grid> grid;
    try {
        grid = std::make_shared<const Grid>(build_grid(cfg.domain, cfg.n_cells));
    } catch (const std::invalid_argument& e) {
        return finish(1, std::string("grid construction failed: ") + e.what());
    }
    fmt::print(report, "grid.h = {:.17g}\ngrid.unknowns = {}\ngrid.mirror_symmetric = {}\n", grid->h(),
               grid->size(), grid->node_set_mirror_symmetric());

    note(fmt::format("solving m = {} on {} unknowns", cfg.m, grid->size()));
    const Solution sol = solve_system(Problem{grid, *alpha, cfg.f, cfg.solve});
    write_report(report, sol.report);
    try {
        write_file(cfg.output_dir / "nodes.csv", [&](std::ostream& os) { grid->write_csv(os); });
        write_file(cfg.output_dir / "fields.csv", [&](std::ostream& os) { sol.stack.write_csv(os); });
    } catch (const fs::filesystem_error& e) {
        return finish(3, e.what());
    }
    outcome.solve_ok = sol.report.ok();
    if (!sol.report.converged)
        return finish(1, "solve failed: " + sol.report.message);

    bool expectation = true;
    if (cfg.sweep) {
        const double tol = cfg.sweep_tol * sol.stack.sup_norm(0);
        MovingPlaneReport mp;
        try {
            mp = sweep_mu(sol.stack, tol, &cfg.f);
        } catch (const std::exception& e) {
            return finish(1, std::string("sweep failed: ") + e.what());
        }
        mp.lipschitz = f1.lipschitz;
        write_report(report, mp);
        try {
            write_file(cfg.output_dir / "sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, mp); });
            write_file(cfg.output_dir / "plotdata" / "sweep_min.dat",
                       [&](std::ostream& os) { write_plot_data(os, mp); });
        } catch (const fs::filesystem_error& e) {
            return finish(3, e.what());
        }
        if (cfg.negative_control)
            expectation = mp.first_violation && *mp.first_violation > 0.0;
        else
            expectation = mp.mu_is_zero();
        fmt::print(report, "sweep.expectation = {}\n",
                   cfg.negative_control ? "violation expected" : "mu_hat = 0 expected");
        fmt::print(report, "sweep.expectation_met = {}\n", expectation);
    }
    outcome.sweep_expectation_met = expectation;

    if (cfg.barrier) {
        try {
            const BarrierReport b = barrier_check(cfg.barrier->a, cfg.barrier->r, cfg.barrier->K);
            write_report(report, b);
            write_file(cfg.output_dir / "plotdata" / "barrier.dat", [&](std::ostream& os) {
                os << "# rho laplacian_h_plus_Kh\n";
                for (std::size_t k = 0; k < b.radii.size(); ++k)
                    fmt::print(os, "{:.17g} {:.17g}\n", b.radii[k], b.values[k]);
            });
        } catch (const std::invalid_argument& e) {
            fmt::print(report, "barrier.error = {}\n", e.what());
        }
    }

    if (cfg.singular) {
        const bool centred_disc = cfg.domain.shape == Shape::disc;
        if (!centred_disc) {
            fmt::print(report, "singular.skipped = requires a centred disc\n");
        } else {
            std::vector<double> lambdas;
            for (int k = 2 * cfg.n_cells - 1; k >= 0; --k)
                lambdas.push_back(0.5 * k * grid->h());
            const MovingPlaneReport sp = singular_profile_experiment(*grid, lambdas, cfg.domain.radius);
            const double harmonic = green_harmonic_residual(*grid, 0.1, cfg.domain.radius);
            fmt::print(report, "singular.planes = {}\n", sp.entries.size());
            fmt::print(report, "singular.all_positive = {}\n", !sp.first_violation.has_value());
            fmt::print(report, "singular.harmonic_residual = {:.6e}\n", harmonic);
            write_file(cfg.output_dir / "plotdata" / "singular_min.dat",
                       [&](std::ostream& os) { write_plot_data(os, sp); });
        }
    }

    if (!expectation)
        return finish(1, cfg.negative_control ? "negative control failed to produce a violation"
                                              : "moving-plane sweep did not reach lambda = 0");
    return finish(0, "ok");
}

}  // namespace mplab
