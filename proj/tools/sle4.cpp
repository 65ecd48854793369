// Command-line front end: probability curves, Monte Carlo verification, trace
// sampling and the self-check suite.
//
//   sle4 prob  --bc dd --mu 0 --p 3.14159265 --grid 199
//   sle4 mc    --bc dn --x 3.14159265 --p 3.14159265 --paths 100000
//   sle4 trace --bc su2 --a-re 0.6 --b-re 0.8 --seed 7 --samples 64
//   sle4 check --format json
//
// Exit codes: 0 ok, 1 numeric failure, 2 usage error, 3 check failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sle4/sle4.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int exit_ok = 0;
constexpr int exit_numeric = 1;
constexpr int exit_usage = 2;
constexpr int exit_check = 3;

// Budget for the time-discretization bias of the Monte Carlo estimates,
// added to the statistical allowance before forming z-scores.
constexpr double mc_bias_budget = 0.01;
constexpr double mc_z_limit = 4.0;

struct RunSpec {
    std::string command;
    std::string bc = "dd";
    double mu = 0.0;
    std::optional<double> mu_lambda;
    double a_re = 0.0, a_im = 0.0, b_re = 1.0, b_im = 0.0;
    bool normalize = false;
    double p = sle4::special::pi;
    std::optional<double> x;
    std::optional<std::size_t> grid;
    std::uint64_t paths = 100000;
    double dt = 1e-3;
    double t_cut = 0.0;
    bool no_barrier = false;
    std::uint64_t seed = 1;
    std::uint64_t path_index = 0;
    unsigned workers = 1;
    bool timing = false;
    std::string format = "csv";
    std::string out;
    std::size_t samples = 32;
    std::string driver = "chordal";
    double w0 = 0.0;
    std::optional<double> t_max;
    std::string mutate = "none";
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

sle4::BoundaryCondition make_bc(const RunSpec& s) {
    if (s.bc == "dd") {
        return sle4::DirichletUncompactified{s.mu_lambda ? *s.mu_lambda * sle4::lambda : s.mu};
    }
    if (s.bc == "dn") return sle4::DirichletNeumann{};
    const sle4::complex a(s.a_re, s.a_im);
    const sle4::complex b(s.b_re, s.b_im);
    return s.normalize ? sle4::SU2::normalized(a, b) : sle4::SU2(a, b);
}

sle4::SimConfig make_sim(const RunSpec& s) {
    sle4::SimConfig cfg;
    cfg.x0 = s.x.value_or(sle4::special::pi);
    cfg.p = s.p;
    cfg.dt0 = s.dt;
    cfg.n_paths = s.paths;
    cfg.seed = s.seed;
    cfg.barrier_correction = !s.no_barrier;
    cfg.t_cut = s.t_cut;
    cfg.workers = s.workers;
    cfg.validate();
    return cfg;
}

json triple_json(const sle4::ProbabilityTriple& t) {
    json j;
    j["alpha"] = t.alpha;
    j["beta"] = t.beta;
    j["gamma"] = t.gamma;
    return j;
}

json header_json(const RunSpec& s) {
    json j;
    j["command"] = s.command;
    j["bc"] = s.bc;
    if (s.bc == "dd") j["mu"] = s.mu_lambda ? *s.mu_lambda * sle4::lambda : s.mu;
    if (s.bc == "su2") {
        j["a_re"] = s.a_re;
        j["a_im"] = s.a_im;
        j["b_re"] = s.b_re;
        j["b_im"] = s.b_im;
    }
    j["p"] = s.p;
    return j;
}

int cmd_prob(const RunSpec& s, std::ostream& os) {
    if (s.x && s.grid) throw CLI::ValidationError("--x and --grid are mutually exclusive");
    if (!s.x && !s.grid) throw CLI::ValidationError("prob needs --x or --grid");
    const auto bc = make_bc(s);
    const std::vector<double> xs = s.x ? std::vector<double>{*s.x} : sle4::uniform_grid(*s.grid);
    const auto curve = sle4::probability_curve(bc, s.p, xs);
    if (s.format == "json") {
        json j = header_json(s);
        json rows = json::array();
        for (const auto& c : curve) {
            json r;
            r["x"] = c.x;
            r["alpha"] = c.probs.alpha;
            r["beta"] = c.probs.beta;
            r["gamma"] = c.probs.gamma;
            rows.push_back(r);
        }
        j["rows"] = rows;
        os << j.dump(2) << '\n';
    } else {
        os << "x,alpha,beta,gamma\n";
        for (const auto& c : curve) {
            os << num(c.x) << ',' << num(c.probs.alpha) << ',' << num(c.probs.beta) << ',' << num(c.probs.gamma) << '\n';
        }
    }
    return exit_ok;
}

// z-score after removing the bias budget; the binomial standard error is
// floored at 1/N so that components with no observed events stay finite.
double budgeted_z(double estimate, double closed, double se, std::uint64_t n) {
    const double d = estimate - closed;
    const double excess = std::max(0.0, std::fabs(d) - mc_bias_budget);
    if (excess == 0.0) return 0.0;
    return std::copysign(excess / std::max(se, 1.0 / static_cast<double>(n)), d);
}

int cmd_mc(const RunSpec& s, std::ostream& os) {
    const auto bc = make_bc(s);
    const sle4::SimConfig cfg = make_sim(s);
    const auto t0 = std::chrono::steady_clock::now();
    const sle4::McResult r = sle4::mc_estimate(bc, cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const sle4::ProbabilityTriple cf = sle4::probabilities(bc, cfg.x0, cfg.p);
    const sle4::ProbabilityTriple z{budgeted_z(r.estimate.alpha, cf.alpha, r.stderr_.alpha, r.n_paths),
                                    budgeted_z(r.estimate.beta, cf.beta, r.stderr_.beta, r.n_paths),
                                    budgeted_z(r.estimate.gamma, cf.gamma, r.stderr_.gamma, r.n_paths)};
    const bool pass = std::fabs(z.alpha) <= mc_z_limit && std::fabs(z.beta) <= mc_z_limit &&
                      std::fabs(z.gamma) <= mc_z_limit;
    if (s.format == "json") {
        json j = header_json(s);
        j["x"] = cfg.x0;
        j["estimate"] = triple_json(r.estimate);
        j["stderr"] = triple_json(r.stderr_);
        j["closed_form"] = triple_json(cf);
        j["z_scores"] = triple_json(z);
        j["bias_budget"] = mc_bias_budget;
        j["n_paths"] = r.n_paths;
        j["dt0"] = cfg.dt0;
        j["seed"] = cfg.seed;
        j["failed_paths"] = r.counts.failed;
        if (s.timing) j["wall_time"] = wall;
        j["pass"] = pass;
        os << j.dump(2) << '\n';
    } else {
        os << "component,estimate,stderr,closed_form,z_score\n";
        const char* names[] = {"alpha", "beta", "gamma"};
        const double est[] = {r.estimate.alpha, r.estimate.beta, r.estimate.gamma};
        const double se[] = {r.stderr_.alpha, r.stderr_.beta, r.stderr_.gamma};
        const double c[] = {cf.alpha, cf.beta, cf.gamma};
        const double zz[] = {z.alpha, z.beta, z.gamma};
        for (int i = 0; i < 3; ++i) {
            os << names[i] << ',' << num(est[i]) << ',' << num(se[i]) << ',' << num(c[i]) << ',' << num(zz[i]) << '\n';
        }
        if (s.timing) std::cerr << "wall_time " << wall << " s\n";
    }
    return pass ? exit_ok : exit_check;
}

sle4::Driver parse_driver(const std::string& d) {
    if (d == "chordal") return sle4::Driver::Chordal;
    if (d == "zhan") return sle4::Driver::Zhan;
    return sle4::Driver::Constant;
}

int cmd_trace(const RunSpec& s, std::ostream& os) {
    if (s.samples == 0) throw CLI::ValidationError("--samples must be positive");
    const auto bc = make_bc(s);
    const sle4::Driver driver = parse_driver(s.driver);
    sle4::SimConfig sim = make_sim(s);
    std::optional<sle4::DriverPath> path;
    std::vector<double> times;
    std::string outcome = "none";
    double tau = 0.0;
    if (driver == sle4::Driver::Constant) {
        const double t_end = s.t_max.value_or(s.p / 4.0);
        if (!(t_end > 0.0 && t_end < s.p)) throw sle4::DomainError("--t-max must lie in (0, p)");
        path.emplace(sle4::DriverPath::constant(s.w0, t_end));
        for (std::size_t i = 1; i <= s.samples; ++i) {
            times.push_back(t_end * static_cast<double>(i) / static_cast<double>(s.samples));
        }
    } else {
        sle4::LoewnerConfig lc;
        lc.sim = sim;
        lc.driver = driver;
        if (s.t_max) lc.t_stop = *s.t_max;
        const sle4::LoewnerPath lp = sle4::evolve(bc, lc, s.path_index);
        outcome = lp.exited ? sle4::to_string(lp.outcome.kind) : "stopped";
        tau = lp.outcome.tau;
        path.emplace(sle4::DriverPath::from(lp));
        const double t_end = path->end_time();
        for (std::size_t i = 1; i <= s.samples; ++i) {
            times.push_back(t_end * static_cast<double>(i) / static_cast<double>(s.samples + 1));
        }
    }
    const auto pts = sle4::trace(*path, s.p, s.dt, times);
    bool all_ok = true;
    if (s.format == "json") {
        json j = header_json(s);
        j["driver"] = s.driver;
        j["seed"] = s.seed;
        j["path_index"] = s.path_index;
        j["outcome"] = outcome;
        j["tau"] = tau;
        json rows = json::array();
        for (const auto& pt : pts) {
            json r;
            r["t"] = pt.t;
            r["re"] = pt.ok ? json(pt.re) : json(nullptr);
            r["im"] = pt.ok ? json(pt.im) : json(nullptr);
            rows.push_back(r);
            all_ok = all_ok && pt.ok;
        }
        j["points"] = rows;
        os << j.dump(2) << '\n';
    } else {
        os << "t,re,im\n";
        for (const auto& pt : pts) {
            if (pt.ok) {
                os << num(pt.t) << ',' << num(pt.re) << ',' << num(pt.im) << '\n';
            } else {
                os << num(pt.t) << ",nan,nan\n";
                all_ok = false;
            }
        }
    }
    if (!all_ok) {
        std::cerr << "trace: some samples passed too close to the singularity\n";
        return exit_numeric;
    }
    return exit_ok;
}

int cmd_check(const RunSpec& s, std::ostream& os) {
    const auto results = sle4::checks::run_checks(sle4::checks::parse_mutation(s.mutate));
    std::size_t failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    if (s.format == "json") {
        json j;
        j["command"] = "check";
        j["mutation"] = s.mutate;
        j["passed"] = failed == 0;
        j["n_checks"] = results.size();
        j["n_failed"] = failed;
        json rows = json::array();
        for (const auto& r : results) {
            json c;
            c["name"] = r.name;
            c["passed"] = r.passed;
            c["value"] = r.value;
            c["tolerance"] = r.tolerance;
            rows.push_back(c);
        }
        j["checks"] = rows;
        os << j.dump(2) << '\n';
    } else {
        os << "name,passed,value,tolerance\n";
        for (const auto& r : results) {
            os << r.name << ',' << (r.passed ? 1 : 0) << ',' << num(r.value) << ',' << num(r.tolerance) << '\n';
        }
    }
    return failed == 0 ? exit_ok : exit_check;
}

// Options shared by the subcommands; the last occurrence of a flag wins, so
// explicit flags override values taken from --spec.
void add_options(CLI::App* sub, RunSpec& s, bool sim, bool prob_grid) {
    const auto last = CLI::MultiOptionPolicy::TakeLast;
    sub->add_option("--bc", s.bc, "boundary condition")->check(CLI::IsMember({"dd", "dn", "su2"}))->multi_option_policy(last);
    auto* mu = sub->add_option("--mu", s.mu, "DD height offset")->multi_option_policy(last);
    sub->add_option("--mu-lambda", s.mu_lambda, "DD height offset in units of pi/sqrt2")
        ->excludes(mu)
        ->multi_option_policy(last);
    sub->add_option("--a-re", s.a_re, "Re a (SU(2))")->multi_option_policy(last);
    sub->add_option("--a-im", s.a_im, "Im a (SU(2))")->multi_option_policy(last);
    sub->add_option("--b-re", s.b_re, "Re b (SU(2))")->multi_option_policy(last);
    sub->add_option("--b-im", s.b_im, "Im b (SU(2))")->multi_option_policy(last);
    sub->add_flag("--normalize", s.normalize, "rescale (a, b) onto |a|^2 + |b|^2 = 1");
    sub->add_option("--p", s.p, "modulus")->multi_option_policy(last);
    sub->add_option("--x", s.x, "marked point in (0, 2 pi)")->multi_option_policy(last);
    sub->add_option("--format", s.format, "output format")->check(CLI::IsMember({"csv", "json"}))->multi_option_policy(last);
    sub->add_option("--out", s.out, "output path (default stdout)")->multi_option_policy(last);
    if (prob_grid) sub->add_option("--grid", s.grid, "number of interior grid points")->multi_option_policy(last);
    if (sim) {
        sub->add_option("--paths", s.paths, "number of paths")->multi_option_policy(last);
        sub->add_option("--dt", s.dt, "base time step dt0")->multi_option_policy(last);
        sub->add_option("--t-cut", s.t_cut, "terminal cutoff (default dt0)")->multi_option_policy(last);
        sub->add_flag("--no-barrier", s.no_barrier, "disable the barrier-crossing correction");
        sub->add_option("--seed", s.seed, "RNG seed")->multi_option_policy(last);
        sub->add_option("--workers", s.workers, "worker threads")->multi_option_policy(last);
        sub->add_flag("--timing", s.timing, "report wall time");
    }
}

// Expands --spec FILE into flag tokens placed before the explicit ones.
std::vector<std::string> expand_spec(std::vector<std::string> args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        std::size_t span = 0;
        if (args[i] == "--spec" && i + 1 < args.size()) {
            path = args[i + 1];
            span = 2;
        } else if (args[i].rfind("--spec=", 0) == 0) {
            path = args[i].substr(7);
            span = 1;
        } else {
            continue;
        }
        std::ifstream in(path);
        if (!in) throw CLI::ValidationError("cannot read spec file " + path);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw CLI::ValidationError(std::string("malformed spec file: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ValidationError("spec file must hold a JSON object");
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + span));
        std::vector<std::string> tokens;
        bool has_command = !args.empty() && args[0].rfind("--", 0) != 0;
        for (const auto& [key, value] : j.items()) {
            if (key == "command") {
                if (!has_command) {
                    args.insert(args.begin(), value.get<std::string>());
                    has_command = true;
                }
                continue;
            }
            const std::string flag = "--" + key;
            if (value.is_boolean()) {
                if (value.get<bool>()) tokens.push_back(flag);
            } else if (value.is_string()) {
                tokens.push_back(flag);
                tokens.push_back(value.get<std::string>());
            } else if (value.is_number_integer()) {
                tokens.push_back(flag);
                tokens.push_back(std::to_string(value.get<long long>()));
            } else if (value.is_number()) {
                tokens.push_back(flag);
                tokens.push_back(num(value.get<double>()));
            } else {
                throw CLI::ValidationError("unsupported value for spec key '" + key + "'");
            }
        }
        const auto at = args.begin() + (has_command ? 1 : 0);
        args.insert(at, tokens.begin(), tokens.end());
        return args;
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    RunSpec spec;
    CLI::App app{"SLE4 passage probabilities on the cylinder", "sle4"};
    app.require_subcommand(1);
    auto* prob = app.add_subcommand("prob", "passage probabilities on a grid or at one point");
    auto* mc = app.add_subcommand("mc", "Monte Carlo estimate against the closed form");
    auto* tr = app.add_subcommand("trace", "trace samples for a seeded run");
    auto* check = app.add_subcommand("check", "self-check suite");
    add_options(prob, spec, false, true);
    add_options(mc, spec, true, false);
    add_options(tr, spec, true, false);
    tr->add_option("--samples", spec.samples, "number of trace samples")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    tr->add_option("--driver", spec.driver, "driving process")
        ->check(CLI::IsMember({"chordal", "zhan", "constant"}))
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    tr->add_option("--w0", spec.w0, "constant driver value")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    tr->add_option("--t-max", spec.t_max, "last sample time")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    tr->add_option("--path-index", spec.path_index, "path substream")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    check->add_option("--format", spec.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    check->add_option("--out", spec.out, "output path (default stdout)")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    check->add_option("--mutate", spec.mutate, "perturb a formula to exercise the suite")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_spec(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }
    spec.command = app.get_subcommands().front()->get_name();

    std::ostringstream buffer;
    int code = exit_ok;
    try {
        if (spec.command == "prob") code = cmd_prob(spec, buffer);
        else if (spec.command == "mc") code = cmd_mc(spec, buffer);
        else if (spec.command == "trace") code = cmd_trace(spec, buffer);
        else code = cmd_check(spec, buffer);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const sle4::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const sle4::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return exit_numeric;
    }

    if (spec.out.empty()) {
        std::cout << buffer.str();
    } else {
        std::ofstream f(spec.out, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot write " << spec.out << '\n';
            return exit_usage;
        }
        f << buffer.str();
    }
    return code;
}
