// Command-line front end: single-model reports, mechanism evaluation, regime
// classification, impossibility bounds and the figure sweeps.
//
// Exit codes: 0 success, 2 invalid input, 3 solver failure.

#include <CLI11.hpp>
#include <json.hpp>
#include <secgame/secgame.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace secgame;
using nlohmann::json;

namespace {

struct ModelFlags {
    std::string family;
    double a = 0, c = 0, a1 = 0, a2 = 0, rho = 0;
    int n = 0, n1 = 0, n2 = 0;
    std::string risk = "exp";
    std::string matrix;  // rows separated by ';', entries by ','
    std::string costs;
};

Vec parse_numbers(const std::string& s, char sep) {
    Vec out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

GameModel build_model(const ModelFlags& f) {
    if (f.family == "selfdep") return GameModel::self_dependence(f.a, f.n, f.c);
    if (f.family == "twoclass") return GameModel::two_class(f.a1, f.a2, f.n1, f.n2, f.c);
    if (f.family == "dominant") return GameModel::dominant(f.a, f.n, f.c);
    if (f.family == "star") {
        require(f.risk == "exp" || f.risk == "reciprocal", "star risk must be exp or reciprocal");
        return GameModel::star(f.n, f.c, f.risk == "exp" ? RiskKind::Exponential : RiskKind::Reciprocal);
    }
    if (f.family == "weakestlink") return GameModel::weakest_link(f.n, f.rho, f.c);
    if (f.family == "wte") {
        std::vector<Vec> rows;
        std::stringstream ss(f.matrix);
        std::string row;
        while (std::getline(ss, row, ';'))
            if (!row.empty()) rows.push_back(parse_numbers(row, ','));
        return GameModel::general_wte(rows, parse_numbers(f.costs, ','));
    }
    throw std::invalid_argument("unknown family: " + f.family +
                                " (expected selfdep|twoclass|dominant|star|weakestlink|wte)");
}

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
    cmd->add_option("--model", f.family, "family: selfdep|twoclass|dominant|star|weakestlink|wte")
        ->required();
    cmd->add_option("--a", f.a, "self-weight (selfdep) / dominant weight");
    cmd->add_option("--c", f.c, "unit investment cost");
    cmd->add_option("--n", f.n, "number of users");
    cmd->add_option("--a1", f.a1, "self-weight of the self-dependent class");
    cmd->add_option("--a2", f.a2, "self-weight of the reliant class");
    cmd->add_option("--n1", f.n1, "size of the self-dependent class");
    cmd->add_option("--n2", f.n2, "size of the reliant class");
    cmd->add_option("--rho", f.rho, "weakest-link sharpness");
    cmd->add_option("--risk", f.risk, "star risk kind: exp|reciprocal");
    cmd->add_option("--matrix", f.matrix, "wte influence rows, e.g. \"2,.5;.4,1.5\"");
    cmd->add_option("--costs", f.costs, "wte unit costs, e.g. \".5,.4\"");
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string join(const Vec& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ", ") + fmt(x);
    return s;
}

EeSelection parse_selection(const std::string& s) {
    if (s == "first") return EeSelection::FirstEnumerated;
    if (s == "worst") return EeSelection::WorstForOutlier;
    throw std::invalid_argument("selection must be first|worst");
}

void print_exit_set(const GameModel& model, int outlier) {
    auto ees = exit_equilibria(model, outlier);
    for (std::size_t k = 0; k < ees.size(); ++k) {
        const auto& e = ees[k];
        std::printf("  outlier %d ee[%zu]%s%s: profile = (%s), outlier cost %s\n", outlier, k,
                    e.case_label.empty() ? "" : " ", e.case_label.c_str(), join(e.profile).c_str(),
                    fmt(user_cost(model, outlier, e.profile)).c_str());
    }
}

int cmd_solve(const ModelFlags& flags, int outlier, bool all_exits) {
    GameModel model = build_model(flags);
    auto so = social_optimum(model);
    std::printf("model: %s\n", model.describe().c_str());
    std::printf("social optimum: (%s)\n", join(so.x).c_str());
    std::printf("  social cost %s, kkt residual %.2e, slackness %.2e, support size %zu\n",
                fmt(social_cost(model, so.x)).c_str(), so.kkt.max_residual, so.kkt.max_slackness,
                so.kkt.support.size());
    auto ne = nash_equilibrium(model);
    std::printf("nash equilibrium: (%s)\n", join(ne).c_str());
    std::printf("price of anarchy: %s\n", fmt(price_of_anarchy(model)).c_str());
    std::printf("exit equilibria:\n");
    if (all_exits)
        for (int i = 0; i < model.n(); ++i) print_exit_set(model, i);
    else
        print_exit_set(model, outlier);
    return 0;
}

int cmd_mechanism(const ModelFlags& flags, const std::string& which, const std::string& selection) {
    GameModel model = build_model(flags);
    EeSelection policy = parse_selection(selection);
    MechanismReport rep;
    if (which == "pivotal") {
        rep = pivotal_taxes(model, policy);
    } else if (which == "externality") {
        rep = externality_equilibrium_taxes(model, social_optimum(model).x, policy);
    } else {
        throw std::invalid_argument("--which must be pivotal|externality");
    }
    std::printf("model: %s\n", model.describe().c_str());
    std::printf("%s taxes: (%s)\n", which.c_str(), join(rep.taxes.t).c_str());
    std::printf("budget: %s   weak budget balance: %s\n", fmt(rep.budget).c_str(),
                rep.budget_balanced ? "yes" : "NO");
    for (std::size_t i = 0; i < rep.taxes.t.size(); ++i) {
        std::string per_ee;
        for (std::size_t k = 0; k < rep.vp_per_ee[i].size(); ++k) {
            const auto& label = rep.exit_sets[i][k].case_label;
            per_ee += (k ? " " : "");
            per_ee += (label.empty() ? "ee" + std::to_string(k) : label) + ":" +
                      (rep.vp_per_ee[i][k] ? "yes" : "no");
        }
        std::printf("user %zu: benefit %s, participates: %s  [per exit: %s]\n", i,
                    fmt(rep.participation_benefit[i]).c_str(), rep.vp[i] ? "yes" : "NO", per_ee.c_str());
    }
    return 0;
}

int cmd_classify(const ModelFlags& flags) {
    if (flags.family == "selfdep") {
        auto cases = classify_self_dependence(flags.a, flags.n, flags.c);
        for (const auto& v : cases) {
            std::printf("case %s: vp(externality)=%s bb(pivotal)=%s%s\n", to_string(v.label).c_str(),
                        v.vp_externality == Guarantee::Always ? "always" : "never",
                        v.bb_pivotal == Guarantee::Always ? "always" : "never",
                        v.shares_condition ? "  [shares its condition with a sibling case]" : "");
            for (const auto& c : v.conditions)
                std::printf("  condition %s: lhs %s, rhs %s -> %s\n", c.desc.c_str(), fmt(c.lhs_log).c_str(),
                            fmt(c.rhs_log).c_str(), c.holds ? "holds" : "fails");
        }
        return 0;
    }
    if (flags.family == "dominant") {
        auto v = classify_dominant(flags.a, flags.n, flags.c);
        std::printf("case %s: vp(externality)=never bb(pivotal)=never\n", to_string(v.label).c_str());
        for (const auto& c : v.conditions)
            std::printf("  condition %s: lhs %s, rhs %s -> %s\n", c.desc.c_str(), fmt(c.lhs_log).c_str(),
                        fmt(c.rhs_log).c_str(), c.holds ? "holds" : "fails");
        return 0;
    }
    if (flags.family == "twoclass") {
        auto f = two_class_exit_conditions(flags.a1, flags.a2, flags.n1, flags.n2, flags.c);
        std::printf("reliant outlier invests alone: %s  (%s: lhs %s rhs %s)\n",
                    f.reliant_invests ? "possible" : "no", f.reliant_invests_cond.desc.c_str(),
                    fmt(f.reliant_invests_cond.lhs_log).c_str(), fmt(f.reliant_invests_cond.rhs_log).c_str());
        std::printf("self-dependent outlier free-rides: %s  (%s: lhs %s rhs %s)\n",
                    f.self_dependent_free_rides ? "possible" : "no", f.self_dependent_cond.desc.c_str(),
                    fmt(f.self_dependent_cond.lhs_log).c_str(), fmt(f.self_dependent_cond.rhs_log).c_str());
        std::printf("reliant outlier free-rides: always possible\n");
        return 0;
    }
    throw std::invalid_argument("classify supports selfdep, dominant and twoclass");
}

int cmd_impossibility(const std::string& which, int n, double nreal, double rho, double c,
                      const std::string& risk) {
    ImpossibilityReport rep;
    if (which == "star") {
        require(risk == "exp" || risk == "reciprocal", "--risk must be exp|reciprocal");
        rep = star_impossibility(n, c, risk == "exp" ? RiskKind::Exponential : RiskKind::Reciprocal);
    } else if (which == "weakestlink") {
        rep = weakest_link_impossibility(nreal > 0 ? nreal : n, rho, c);
    } else {
        throw std::invalid_argument("--which must be star|weakestlink");
    }
    std::printf("model: %s\n", rep.model.c_str());
    std::printf("per-user tax caps: (%s)\n", join(rep.per_user_tax_cap).c_str());
    std::printf("cap sum: %s -> %s\n", fmt(rep.cap_sum).c_str(),
                rep.impossible ? "IMPOSSIBLE: no mechanism keeps both VP and weak budget balance"
                               : "inconclusive (caps leave room)");
    if (rep.degenerate_topology) std::printf("warning: n = 2 is a degenerate hub-and-leaf topology\n");
    if (rep.footnote_regime)
        std::printf("benign regime: externality taxes achieve BB+VP (numerically verified: %s)\n",
                    rep.externality_achieves_bb_vp ? "yes" : "no");
    return 0;
}

Family parse_family(const std::string& s) {
    if (s == "selfdep") return Family::SelfDependence;
    if (s == "twoclass") return Family::TwoClass;
    if (s == "dominant") return Family::Dominant;
    throw std::invalid_argument("sweep family must be selfdep|twoclass|dominant");
}

SweepConfig config_from_json(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), "cannot read config file: " + path);
    json j = json::parse(f);
    SweepConfig cfg;
    if (j.contains("preset")) cfg = sweep_preset(j["preset"].get<std::string>());
    if (j.contains("family")) cfg.family = parse_family(j["family"].get<std::string>());
    if (j.contains("param")) cfg.param = j["param"].get<std::string>();
    if (j.contains("start")) cfg.start = j["start"].get<double>();
    if (j.contains("stop")) cfg.stop = j["stop"].get<double>();
    if (j.contains("steps")) cfg.steps = j["steps"].get<int>();
    if (j.contains("log_scale")) cfg.log_scale = j["log_scale"].get<bool>();
    if (j.contains("a")) cfg.a = j["a"].get<double>();
    if (j.contains("c")) cfg.c = j["c"].get<double>();
    if (j.contains("a1")) cfg.a1 = j["a1"].get<double>();
    if (j.contains("a2")) cfg.a2 = j["a2"].get<double>();
    if (j.contains("rho")) cfg.rho = j["rho"].get<double>();
    if (j.contains("n")) cfg.n = j["n"].get<int>();
    if (j.contains("n1")) cfg.n1 = j["n1"].get<int>();
    if (j.contains("n2")) cfg.n2 = j["n2"].get<int>();
    if (j.contains("selection")) cfg.selection = parse_selection(j["selection"].get<std::string>());
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"security investment game laboratory"};
    app.require_subcommand(1);

    ModelFlags solve_flags;
    int solve_outlier = 0;
    auto* solve = app.add_subcommand("solve", "social optimum, nash equilibrium, exit equilibria");
    add_model_flags(solve, solve_flags);
    solve->add_option("--outlier", solve_outlier, "report exit equilibria for this user only")
        ->check(CLI::NonNegativeNumber);

    ModelFlags mech_flags;
    std::string mech_which;
    std::string mech_selection = "first";
    auto* mech = app.add_subcommand("mechanism", "pivotal or externality taxes with VP/BB verdicts");
    add_model_flags(mech, mech_flags);
    mech->add_option("--which", mech_which, "pivotal|externality")->required();
    mech->add_option("--ee-policy", mech_selection, "exit selection: first|worst (default first)");

    ModelFlags cls_flags;
    auto* cls = app.add_subcommand("classify", "regime classification / exit-pattern conditions");
    add_model_flags(cls, cls_flags);

    std::string imp_which, imp_risk = "exp";
    int imp_n = 0;
    double imp_nreal = 0, imp_rho = 1, imp_c = 1;
    auto* imp = app.add_subcommand("impossibility", "counter-example tax-cap bounds");
    imp->add_option("--which", imp_which, "star|weakestlink")->required();
    imp->add_option("--n", imp_n, "number of users");
    imp->add_option("--nreal", imp_nreal, "fractional n for the weakest-link bound");
    imp->add_option("--rho", imp_rho, "weakest-link sharpness");
    imp->add_option("--c", imp_c, "unit investment cost");
    imp->add_option("--risk", imp_risk, "star risk kind: exp|reciprocal");

    std::string sweep_preset_name, sweep_config_path, sweep_output, sweep_selection, sweep_param,
        sweep_family;
    bool sweep_plot = false;
    int sweep_threads = 0, sweep_steps = 0, sweep_n = 0, sweep_n1 = 0, sweep_n2 = 0;
    double sw_start = std::nan(""), sw_stop = std::nan(""), sw_a = std::nan(""), sw_c = std::nan(""),
           sw_a1 = std::nan(""), sw_a2 = std::nan("");
    auto* sweep = app.add_subcommand("sweep", "parameter sweep to CSV (presets fig2..fig7)");
    sweep->add_option("--preset", sweep_preset_name, "fig2|fig3|fig4|fig5|fig6|fig7");
    sweep->add_option("--config", sweep_config_path, "flat JSON config; flags override");
    sweep->add_option("--output", sweep_output, "CSV output path (default <preset>.csv)");
    sweep->add_flag("--plot", sweep_plot, "also emit a matplotlib script next to the CSV");
    sweep->add_option("--threads", sweep_threads, "parallel row computation");
    sweep->add_option("--family", sweep_family, "selfdep|twoclass|dominant");
    sweep->add_option("--param", sweep_param, "swept parameter name");
    sweep->add_option("--start", sw_start, "sweep start");
    sweep->add_option("--stop", sw_stop, "sweep stop");
    sweep->add_option("--steps", sweep_steps, "grid points");
    sweep->add_option("--ee-policy", sweep_selection, "exit selection: first|worst");
    sweep->add_option("--a", sw_a, "fixed a");
    sweep->add_option("--c", sw_c, "fixed c");
    sweep->add_option("--a1", sw_a1, "fixed a1");
    sweep->add_option("--a2", sw_a2, "fixed a2");
    sweep->add_option("--n", sweep_n, "fixed n");
    sweep->add_option("--n1", sweep_n1, "fixed n1");
    sweep->add_option("--n2", sweep_n2, "fixed n2");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (solve->parsed())
            return cmd_solve(solve_flags, solve_outlier, solve->count("--outlier") == 0);
        if (mech->parsed()) return cmd_mechanism(mech_flags, mech_which, mech_selection);
        if (cls->parsed()) return cmd_classify(cls_flags);
        if (imp->parsed()) return cmd_impossibility(imp_which, imp_n, imp_nreal, imp_rho, imp_c, imp_risk);
        if (sweep->parsed()) {
            SweepConfig cfg;
            if (!sweep_config_path.empty()) cfg = config_from_json(sweep_config_path);
            if (!sweep_preset_name.empty()) cfg = sweep_preset(sweep_preset_name);
            if (!sweep_family.empty()) cfg.family = parse_family(sweep_family);
            if (!sweep_param.empty()) cfg.param = sweep_param;
            if (!std::isnan(sw_start)) cfg.start = sw_start;
            if (!std::isnan(sw_stop)) cfg.stop = sw_stop;
            if (sweep_steps > 0) cfg.steps = sweep_steps;
            if (!std::isnan(sw_a)) cfg.a = sw_a;
            if (!std::isnan(sw_c)) cfg.c = sw_c;
            if (!std::isnan(sw_a1)) cfg.a1 = sw_a1;
            if (!std::isnan(sw_a2)) cfg.a2 = sw_a2;
            if (sweep_n > 0) cfg.n = sweep_n;
            if (sweep_n1 > 0) cfg.n1 = sweep_n1;
            if (sweep_n2 > 0) cfg.n2 = sweep_n2;
            if (!sweep_selection.empty()) cfg.selection = parse_selection(sweep_selection);
            if (sweep_threads > 0) cfg.threads = sweep_threads;
            require(!cfg.param.empty(), "sweep needs --preset or a config/flag parameter set");

            SweepResult res = run_sweep(cfg);
            for (const auto& s : res.skipped) std::fprintf(stderr, "skipped %s\n", s.c_str());
            std::string out = !sweep_output.empty()
                                  ? sweep_output
                                  : (cfg.preset.empty() ? std::string("sweep") : cfg.preset) + ".csv";
            write_csv(res, out);
            std::printf("wrote %s (%zu rows, %zu skipped)\n", out.c_str(), res.rows.size(),
                        res.skipped.size());
            if (sweep_plot) {
                std::string script = out.substr(0, out.find_last_of('.')) + "_plot.py";
                emit_plot_script(cfg, out, script);
                std::printf("wrote %s\n", script.c_str());
            }
            return 0;
        }
    } catch (const SolverFailure& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
