#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "analysis.hpp"
#include "mechanisms.hpp"
#include "model.hpp"
#include "solver.hpp"

namespace secgame {

struct SweepConfig {
    std::string preset;  // fig2..fig7, or empty for a custom sweep
    Family family = Family::SelfDependence;
    std::string param;   // one of: a, c, N, a1
    double start = 0.0;
    double stop = 0.0;
    int steps = 2;
    bool log_scale = false;
    // fixed parameters; only the family-relevant ones are read
    double a = 0, c = 0, a1 = 0, a2 = 0, rho = 0;
    int n = 0, n1 = 0, n2 = 0;
    EeSelection selection = EeSelection::WorstForOutlier;
    int threads = 1;
};

struct SweepRow {
    double value = 0.0;
    std::string cases;
    double pivotal_budget = 0.0;
    Vec benefits;     // per class representative
    double poa = 0.0;
    std::string status = "ok";
};

struct SweepResult {
    std::vector<std::string> header;
    std::vector<SweepRow> rows;
    std::vector<std::string> skipped;  // grid points rejected by the standing assumptions
};

inline SweepConfig sweep_preset(const std::string& name) {
    std::string key = name;
    key.erase(std::remove(key.begin(), key.end(), '-'), key.end());
    SweepConfig cfg;
    cfg.preset = key;
    if (key == "fig2") {
        cfg.family = Family::SelfDependence;
        cfg.param = "c";
        cfg.n = 6;
        cfg.a = 10;
        cfg.start = 9.5;
        cfg.stop = 0.5;
        cfg.steps = 46;
    } else if (key == "fig3") {
        cfg.family = Family::SelfDependence;
        cfg.param = "a";
        cfg.n = 6;
        cfg.c = 1;
        cfg.start = 1;
        cfg.stop = 15;
        cfg.steps = 57;
    } else if (key == "fig4") {
        cfg.family = Family::SelfDependence;
        cfg.param = "N";
        cfg.a = 6;
        cfg.c = 1;
        cfg.start = 3;
        cfg.stop = 20;
        cfg.steps = 18;
    } else if (key == "fig5" || key == "fig6") {
        cfg.family = Family::TwoClass;
        cfg.param = "a1";
        cfg.n1 = 8;
        cfg.n2 = 2;
        cfg.c = 0.05;
        cfg.a2 = key == "fig5" ? 0.1 : 0.9;
        cfg.start = 1;
        cfg.stop = 10;
        cfg.steps = 37;
    } else if (key == "fig7") {
        cfg.family = Family::Dominant;
        cfg.param = "a";
        cfg.n = 10;
        cfg.c = 0.45;
        cfg.start = 1;
        cfg.stop = 15;
        cfg.steps = 57;
    } else {
        throw std::invalid_argument("unknown sweep preset: " + name);
    }
    return cfg;
}

namespace detail {

inline GameModel sweep_model_at(const SweepConfig& cfg, double v) {
    auto as_count = [&](double x) { return static_cast<int>(std::llround(x)); };
    switch (cfg.family) {
        case Family::SelfDependence: {
            double a = cfg.param == "a" ? v : cfg.a;
            double c = cfg.param == "c" ? v : cfg.c;
            int n = cfg.param == "N" ? as_count(v) : cfg.n;
            return GameModel::self_dependence(a, n, c);
        }
        case Family::TwoClass: {
            double a1 = cfg.param == "a1" ? v : cfg.a1;
            double a2 = cfg.param == "a2" ? v : cfg.a2;
            return GameModel::two_class(a1, a2, cfg.n1, cfg.n2, cfg.param == "c" ? v : cfg.c);
        }
        case Family::Dominant: {
            double a = cfg.param == "a" ? v : cfg.a;
            int n = cfg.param == "N" ? as_count(v) : cfg.n;
            return GameModel::dominant(a, n, cfg.param == "c" ? v : cfg.c);
        }
        default:
            throw std::invalid_argument("sweep: only the self-dependence, two-class and dominant families are swept");
    }
}

inline std::string sweep_cases(const SweepConfig& cfg, const GameModel& model) {
    switch (cfg.family) {
        case Family::SelfDependence: {
            const auto& m = model.as_self_dependence();
            std::string s;
            for (const auto& verdict : classify_self_dependence(m.a, m.n, m.c)) {
                if (!s.empty()) s += "+";
                s += to_string(verdict.label);
            }
            return s;
        }
        case Family::TwoClass: {
            const auto& m = model.as_two_class();
            TwoClassEeFlags f = two_class_exit_conditions(m.a1, m.a2, m.n1, m.n2, m.c);
            std::string s = f.self_dependent_free_rides ? "n1-free" : "n1-interior";
            s += f.reliant_invests ? "|n2-invest" : "|n2-free";
            return s;
        }
        case Family::Dominant: {
            const auto& m = model.as_dominant();
            return to_string(classify_dominant(m.a, m.n, m.c).label);
        }
        default:
            return "";
    }
}

inline std::vector<int> class_representatives(const SweepConfig& cfg) {
    switch (cfg.family) {
        case Family::TwoClass: return {0, cfg.n1};
        case Family::Dominant: return {0, 1};
        default: return {0};
    }
}

}  // namespace detail

inline std::vector<std::string> sweep_header(const SweepConfig& cfg) {
    std::vector<std::string> h{cfg.param, "cases", "pivotal_budget"};
    switch (cfg.family) {
        case Family::TwoClass:
            h.push_back("ext_benefit_n1");
            h.push_back("ext_benefit_n2");
            break;
        case Family::Dominant:
            h.push_back("ext_benefit_dom");
            h.push_back("ext_benefit_rest");
            break;
        default:
            h.push_back("ext_benefit");
            break;
    }
    h.push_back("poa");
    h.push_back("status");
    return h;
}

inline SweepResult run_sweep(const SweepConfig& cfg) {
    require(cfg.steps >= 2, "sweep: steps >= 2 required");
    require(cfg.threads >= 1, "sweep: threads >= 1 required");
    switch (cfg.family) {
        case Family::SelfDependence:
            require(cfg.param == "a" || cfg.param == "c" || cfg.param == "N",
                    "sweep: self-dependence sweeps a, c or N");
            break;
        case Family::TwoClass:
            require(cfg.param == "a1" || cfg.param == "a2" || cfg.param == "c",
                    "sweep: two-class sweeps a1, a2 or c");
            break;
        case Family::Dominant:
            require(cfg.param == "a" || cfg.param == "c" || cfg.param == "N",
                    "sweep: dominant sweeps a, c or N");
            break;
        default:
            throw std::invalid_argument("sweep: only the self-dependence, two-class and dominant families are swept");
    }
    SweepResult res;
    res.header = sweep_header(cfg);

    Vec grid(static_cast<std::size_t>(cfg.steps));
    for (int k = 0; k < cfg.steps; ++k) {
        double t = static_cast<double>(k) / (cfg.steps - 1);
        grid[static_cast<std::size_t>(k)] =
            cfg.log_scale ? cfg.start * std::exp(t * std::log(cfg.stop / cfg.start))
                          : cfg.start + t * (cfg.stop - cfg.start);
    }

    struct Slot {
        bool skipped = false;
        std::string skip_reason;
        SweepRow row;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(cfg.steps));

    auto compute = [&](int k) {
        Slot& slot = slots[static_cast<std::size_t>(k)];
        double v = grid[static_cast<std::size_t>(k)];
        slot.row.value = v;
        try {
            GameModel model = detail::sweep_model_at(cfg, v);
            slot.row.cases = detail::sweep_cases(cfg, model);
            MechanismReport piv = pivotal_taxes(model, cfg.selection);
            SocialOptimum so = social_optimum(model);
            MechanismReport ext = externality_equilibrium_taxes(model, so.x, cfg.selection);
            slot.row.pivotal_budget = piv.budget;
            for (int rep_user : detail::class_representatives(cfg))
                slot.row.benefits.push_back(ext.participation_benefit[static_cast<std::size_t>(rep_user)]);
            slot.row.poa = price_of_anarchy(model);
            slot.row.status = "ok";
        } catch (const std::invalid_argument& e) {
            slot.skipped = true;
            slot.skip_reason = e.what();
        } catch (const SolverFailure& e) {
            slot.row.status = "error:solver";
            slot.row.pivotal_budget = std::nan("");
            slot.row.benefits.assign(detail::class_representatives(cfg).size(), std::nan(""));
            slot.row.poa = std::nan("");
            (void)e;
        }
    };

    if (cfg.threads == 1) {
        for (int k = 0; k < cfg.steps; ++k) compute(k);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < cfg.threads; ++t)
            pool.emplace_back([&, t] {
                for (int k = t; k < cfg.steps; k += cfg.threads) compute(k);
            });
        for (auto& th : pool) th.join();
    }

    for (int k = 0; k < cfg.steps; ++k) {
        Slot& slot = slots[static_cast<std::size_t>(k)];
        if (slot.skipped) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.12g", grid[static_cast<std::size_t>(k)]);
            res.skipped.push_back(cfg.param + "=" + buf + ": " + slot.skip_reason);
        } else {
            res.rows.push_back(std::move(slot.row));
        }
    }
    return res;
}

inline std::string format_csv_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string to_csv(const SweepResult& res) {
    std::ostringstream os;
    for (std::size_t i = 0; i < res.header.size(); ++i) os << (i ? "," : "") << res.header[i];
    os << "\n";
    for (const auto& r : res.rows) {
        os << format_csv_number(r.value) << "," << r.cases << "," << format_csv_number(r.pivotal_budget);
        for (double b : r.benefits) os << "," << format_csv_number(b);
        os << "," << format_csv_number(r.poa) << "," << r.status << "\n";
    }
    return os.str();
}

inline void write_csv(const SweepResult& res, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    require(f.good(), "cannot open CSV output path: " + path);
    f << to_csv(res);
}

// Standalone matplotlib script rendering the three sweep panels
// (participation benefit, pivotal budget, price of anarchy).
inline void emit_plot_script(const SweepConfig& cfg, const std::string& csv_path,
                             const std::string& script_path) {
    std::ifstream in(csv_path);
    require(in.good(), "emit_plot_script: cannot read " + csv_path);
    std::string header_line;
    std::getline(in, header_line);
    while (!header_line.empty() && (header_line.back() == '\r' || header_line.back() == '\n'))
        header_line.pop_back();
    std::string expected;
    for (const auto& h : sweep_header(cfg)) expected += (expected.empty() ? "" : ",") + h;
    require(header_line == expected,
            "emit_plot_script: CSV header does not match the sweep schema (got '" + header_line + "')");

    std::vector<std::string> benefit_cols;
    for (const auto& h : sweep_header(cfg))
        if (h.rfind("ext_benefit", 0) == 0) benefit_cols.push_back(h);

    const bool ratio_axis = cfg.preset == "fig2";
    std::ostringstream py;
    py << "#!/usr/bin/env python3\n";
    py << "\"\"\"Render sweep panels from " << csv_path << ".\"\"\"\n";
    py << "import csv\n";
    py << "import matplotlib\n";
    py << "matplotlib.use(\"Agg\")\n";
    py << "import matplotlib.pyplot as plt\n\n";
    py << "CSV_PATH = \"" << csv_path << "\"\n";
    py << "rows = [r for r in csv.DictReader(open(CSV_PATH)) if r[\"status\"] == \"ok\"]\n";
    if (ratio_axis)
        py << "x = [" << format_csv_number(cfg.a) << " / float(r[\"" << cfg.param << "\"]) for r in rows]\n";
    else
        py << "x = [float(r[\"" << cfg.param << "\"]) for r in rows]\n";
    py << "fig, axes = plt.subplots(3, 1, figsize=(7, 9), sharex=True)\n";
    for (const auto& col : benefit_cols)
        py << "axes[0].plot(x, [float(r[\"" << col << "\"]) for r in rows], marker=\".\", label=\"" << col
           << "\")\n";
    py << "axes[0].axhline(0.0, color=\"gray\", lw=0.8)\n";
    py << "axes[0].set_ylabel(\"participation benefit\")\n";
    py << "axes[0].legend()\n";
    py << "axes[1].plot(x, [float(r[\"pivotal_budget\"]) for r in rows], marker=\".\", color=\"tab:red\")\n";
    py << "axes[1].axhline(0.0, color=\"gray\", lw=0.8)\n";
    py << "axes[1].set_ylabel(\"pivotal budget\")\n";
    py << "axes[2].plot(x, [float(r[\"poa\"]) for r in rows], marker=\".\", color=\"tab:green\")\n";
    py << "axes[2].set_ylabel(\"price of anarchy\")\n";
    py << "axes[2].set_xlabel(\"" << (ratio_axis ? "a/c" : cfg.param) << "\")\n";
    py << "fig.suptitle(\"" << (cfg.preset.empty() ? "sweep" : cfg.preset) << "\")\n";
    py << "fig.tight_layout()\n";
    py << "out = CSV_PATH.rsplit(\".\", 1)[0] + \".png\"\n";
    py << "fig.savefig(out, dpi=150)\n";
    py << "print(\"wrote\", out)\n";

    std::ofstream f(script_path, std::ios::binary);
    require(f.good(), "emit_plot_script: cannot open " + script_path);
    f << py.str();
}

}  // namespace secgame
