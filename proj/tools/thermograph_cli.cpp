// Command-line surface for the thermograph library: entropy evaluation, the
// invariant verification suites, and the incompleteness / thin-part /
// shortcut experiments.  All sampling is seeded; identical configurations
// produce byte-identical CSV.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thermograph/csv.hpp"
#include "thermograph/experiments.hpp"
#include "thermograph/verify.hpp"

using namespace thermograph;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitBudget = 4;

// Parse a real that may be written as a difference, e.g. "1-1e-8".
double parse_real(const std::string& s) {
    for (size_t i = 1; i < s.size(); ++i) {
        if (s[i] == '-' && s[i - 1] != 'e' && s[i - 1] != 'E') {
            return parse_real(s.substr(0, i)) - std::stod(s.substr(i + 1));
        }
    }
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw ConfigError("malformed number '" + s + "'");
    return v;
}

std::vector<double> parse_reals(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "inf") out.push_back(kInf);
        else out.push_back(parse_real(item));
    }
    return out;
}

// family spec "rose:3", "theta:2", "barbell", "g:2,2", "rose_theta:4"
Graph graph_from_family(const std::string& spec) {
    std::string name = spec;
    std::vector<int> params;
    size_t colon = spec.find(':');
    if (colon != std::string::npos) {
        name = spec.substr(0, colon);
        std::stringstream ss(spec.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) params.push_back(std::stoi(item));
    }
    return standard_graph(name, params);
}

struct GraphSource {
    std::string family;
    std::string file;

    Graph load() const {
        if (!family.empty() && !file.empty())
            throw ConfigError("give either --family or --graph-file, not both");
        if (!family.empty()) return graph_from_family(family);
        if (!file.empty()) {
            std::ifstream f(file);
            if (!f) throw ConfigError("cannot open graph file '" + file + "'");
            std::stringstream buf;
            buf << f.rdbuf();
            return parse_graph_file(buf.str()).graph;
        }
        throw ConfigError("a graph is required (--family or --graph-file)");
    }
};

std::string canonical_config(const std::vector<std::pair<std::string, std::string>>& kv) {
    std::string s;
    for (const auto& [k, v] : kv) s += k + "=" + v + ";";
    return s;
}

int cmd_entropy(const GraphSource& src, const std::string& len_spec) {
    Graph g = src.load();
    std::vector<double> vals = parse_reals(len_spec);
    if (static_cast<int>(vals.size()) != g.num_edges())
        throw ConfigError("--len expects " + std::to_string(g.num_edges()) +
                          " comma-separated values for this graph");
    LengthFunction l = LengthFunction::strict(vals);
    double h = entropy(g, l);
    LengthFunction norm = l.scaled(h);
    std::cout << fmt17(h) << "\n";
    std::cout << "normalized:";
    for (int p = 0; p < norm.size(); ++p) std::cout << " " << fmt17(norm[p]);
    std::cout << "\n";
    return kExitOk;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, long long budget,
               const std::string& out_path) {
    std::vector<CheckResult> results = run_verify(suite, seed, budget);
    CsvWriter csv({"suite", "check", "status", "residual", "threshold", "note"},
                  canonical_config({{"cmd", "verify"},
                                    {"suite", suite},
                                    {"seed", std::to_string(seed)},
                                    {"budget", std::to_string(budget)}}));
    bool all_ok = true;
    for (const auto& r : results) {
        std::string status = r.status == CheckResult::Status::pass   ? "pass"
                             : r.status == CheckResult::Status::fail ? "fail"
                                                                     : "skip";
        if (r.status == CheckResult::Status::fail) all_ok = false;
        csv.row({r.suite, r.name, status, CsvWriter::num(r.residual),
                 CsvWriter::num(r.threshold), r.note});
        std::cerr << "[" << status << "] " << r.suite << "/" << r.name;
        if (r.status == CheckResult::Status::fail)
            std::cerr << " residual " << fmt17(r.residual) << " > " << fmt17(r.threshold);
        if (!r.note.empty()) std::cerr << " (" << r.note << ")";
        std::cerr << "\n";
    }
    csv.write(out_path);
    return all_ok ? kExitOk : kExitNumeric;
}

int cmd_escape_rose(int r, double tmax, const std::string& out_path) {
    EscapeRoseResult res = escape_rose_experiment(r, tmax);
    CsvWriter csv({"t", "dependent_length", "cumulative_length", "total", "envelope"},
                  canonical_config({{"cmd", "escape-rose"},
                                    {"r", std::to_string(r)},
                                    {"tmax", fmt17(tmax)}}));
    for (const auto& cp : res.checkpoints)
        csv.row({CsvWriter::num(cp.t), CsvWriter::num(cp.dependent_length),
                 CsvWriter::num(cp.cumulative), CsvWriter::num(res.total),
                 CsvWriter::num(res.envelope)});
    csv.write(out_path);
    std::cerr << "total length " << fmt17(res.total) << " (envelope " << fmt17(res.envelope)
              << ")\n";
    return kExitOk;
}

int cmd_escape_separating(int n1, int n2, double tmax, long long budget,
                          const std::string& out_path) {
    SeparatedGraph sg = make_separated(double_rose_graph(n1, n2), n1 + n2, budget);
    std::vector<double> target(static_cast<size_t>(n1), std::log(2.0 * n1 - 1.0));
    std::vector<double> l2(static_cast<size_t>(n2), std::log(2.0 * n2 - 1.0) + 0.5);
    EscapeSeparatingResult res = escape_separating_experiment(sg, target, l2, tmax);
    CsvWriter csv({"t", "bridge_length", "cumulative_length", "total", "total_refined"},
                  canonical_config({{"cmd", "escape-separating"},
                                    {"n1", std::to_string(n1)},
                                    {"n2", std::to_string(n2)},
                                    {"tmax", fmt17(tmax)}}));
    for (const auto& cp : res.checkpoints)
        csv.row({CsvWriter::num(cp.t), CsvWriter::num(cp.dependent_length),
                 CsvWriter::num(cp.cumulative), CsvWriter::num(res.total),
                 CsvWriter::num(res.total_refined)});
    csv.write(out_path);
    std::cerr << "total length " << fmt17(res.total) << ", refined "
              << fmt17(res.total_refined) << "\n";
    return kExitOk;
}

int cmd_thin_part(int r, int edge, const std::string& eps_spec, int samples, std::uint64_t seed,
                  const std::string& out_path) {
    std::vector<double> eps = parse_reals(eps_spec);
    ThinPartResult res = thin_part_experiment(r, edge, eps, samples, seed);
    CsvWriter csv({"eps", "diameter_upper", "neg_log_expm1", "samples", "failures", "fitted_C",
                   "max_fit_ratio"},
                  canonical_config({{"cmd", "thin-part"},
                                    {"r", std::to_string(r)},
                                    {"i", std::to_string(edge)},
                                    {"eps", eps_spec},
                                    {"samples", std::to_string(samples)},
                                    {"seed", std::to_string(seed)}}));
    for (const auto& row : res.rows)
        csv.row({CsvWriter::num(row.eps), CsvWriter::num(row.diameter_upper),
                 CsvWriter::num(row.neg_log), CsvWriter::num(row.samples),
                 CsvWriter::num(row.failures), CsvWriter::num(res.fitted_C),
                 CsvWriter::num(res.max_fit_ratio)});
    csv.write(out_path);
    std::cerr << "fitted C " << fmt17(res.fitted_C) << ", max fit ratio "
              << fmt17(res.max_fit_ratio) << "\n";
    return kExitOk;
}

int cmd_shortcut(int n1, int n2, const std::string& delta_spec, long long budget,
                 const std::string& out_path) {
    SeparatedGraph sg = make_separated(double_rose_graph(n1, n2), n1 + n2, budget);
    std::vector<double> deltas = parse_reals(delta_spec);
    auto rows = shortcut_experiment(sg, deltas);
    std::vector<double> totals;
    for (const auto& r : rows) totals.push_back(r.total);
    double limit = aitken_limit(totals);
    CsvWriter csv({"delta", "t_cap", "len_grow", "len_change", "len_return", "total",
                   "extrapolated_limit"},
                  canonical_config({{"cmd", "shortcut"},
                                    {"n1", std::to_string(n1)},
                                    {"n2", std::to_string(n2)},
                                    {"delta", delta_spec}}));
    for (const auto& r : rows)
        csv.row({CsvWriter::num(r.delta), CsvWriter::num(r.t_cap), CsvWriter::num(r.len_grow),
                 CsvWriter::num(r.len_change), CsvWriter::num(r.len_return),
                 CsvWriter::num(r.total), CsvWriter::num(limit)});
    csv.write(out_path);
    std::cerr << "extrapolated limit " << fmt17(limit) << "\n";
    return kExitOk;
}

int cmd_rank2_bounds(int samples, std::uint64_t seed, const std::string& out_path) {
    CsvWriter csv({"graph", "path", "m0", "m1", "bound", "measured", "margin"},
                  canonical_config({{"cmd", "rank2-bounds"},
                                    {"samples", std::to_string(samples)},
                                    {"seed", std::to_string(seed)}}));
    for (Rank2Family fam : {Rank2Family::rose, Rank2Family::barbell, Rank2Family::theta}) {
        auto paths = rank2_lower_bound_paths(fam, samples, seed + static_cast<int>(fam));
        for (size_t i = 0; i < paths.size(); ++i) {
            const auto& p = paths[i];
            csv.row({rank2_name(fam), CsvWriter::num(static_cast<int>(i)), CsvWriter::num(p.m0),
                     CsvWriter::num(p.m1), CsvWriter::num(p.bound), CsvWriter::num(p.measured),
                     CsvWriter::num(p.measured - p.bound)});
        }
    }
    csv.write(out_path);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermograph: entropy, pressure and thermodynamic metrics on metric graphs"};
    app.require_subcommand(1);

    GraphSource src;
    std::string len_spec, out_path, suite = "all";
    std::uint64_t seed = 1;
    long long budget = 10000000;
    int samples = 8;
    double tol = 1e-8;  // accepted for interface compatibility

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "deterministic sampling seed");
        cmd->add_option("--tol", tol, "target tolerance (informational)");
        cmd->add_option("--out", out_path, "output CSV path ('-' for stdout)");
        cmd->add_option("--budget", budget, "cycle-complex simplex budget");
    };

    auto* c_entropy = app.add_subcommand("entropy", "entropy and unit-entropy normalization");
    c_entropy->add_option("--family", src.family, "graph family, e.g. rose:2, theta:2, barbell, g:2,2");
    c_entropy->add_option("--graph-file", src.file, "graph file path");
    c_entropy->add_option("--len", len_spec, "comma-separated edge lengths")->required();

    auto* c_verify = app.add_subcommand("verify", "run invariant suites");
    c_verify->add_option("--suite", suite,
                         "graph|spectral|cycles|metrics|rose|separating|all");
    add_common(c_verify);

    auto* c_exp = app.add_subcommand("experiment", "run a named experiment");
    std::string exp_name;
    int exp_r = 3, exp_i = 0, exp_n1 = 2, exp_n2 = 2;
    std::string tmax_spec = "1-1e-8";
    std::string eps_spec = "0.25,0.125,0.0625,0.03125,0.015625,0.0078125,0.00390625";
    std::string delta_spec = "0.1,0.01,0.001";
    c_exp->add_option("name", exp_name,
                      "escape-rose|escape-separating|thin-part|shortcut|rank2-bounds")
        ->required();
    c_exp->add_option("--r", exp_r, "rose rank");
    c_exp->add_option("--i", exp_i, "pinned edge index (thin-part)");
    c_exp->add_option("--n1", exp_n1, "side-1 loop count (separating experiments)");
    c_exp->add_option("--n2", exp_n2, "side-2 loop count (separating experiments)");
    c_exp->add_option("--tmax", tmax_spec, "path endpoint, e.g. 1-1e-8");
    c_exp->add_option("--eps", eps_spec, "comma-separated slice epsilons");
    c_exp->add_option("--delta", delta_spec, "comma-separated shortcut deltas");
    c_exp->add_option("--samples", samples, "sample count per configuration");
    add_common(c_exp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*c_entropy) return cmd_entropy(src, len_spec);
        if (*c_verify) return cmd_verify(suite, seed, budget, out_path);
        if (*c_exp) {
            double tmax = parse_real(tmax_spec);
            if (exp_name == "escape-rose") return cmd_escape_rose(exp_r, tmax, out_path);
            if (exp_name == "escape-separating")
                return cmd_escape_separating(exp_n1, exp_n2, tmax, budget, out_path);
            if (exp_name == "thin-part")
                return cmd_thin_part(exp_r, exp_i, eps_spec, samples, seed, out_path);
            if (exp_name == "shortcut")
                return cmd_shortcut(exp_n1, exp_n2, delta_spec, budget, out_path);
            if (exp_name == "rank2-bounds") return cmd_rank2_bounds(samples, seed, out_path);
            throw ConfigError("unknown experiment '" + exp_name + "'");
        }
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << " (count " << e.count << ")\n";
        return kExitBudget;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
