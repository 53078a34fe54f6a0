#include "katok/report_io.hpp"

#include <fstream>
#include <sstream>

#include "katok/errors.hpp"

namespace katok {

namespace {

using nlohmann::json;

json selection_json(const SelectionResult& res) {
    return {{"threshold_n", res.threshold_n},
            {"fraction", res.fraction},
            {"size", static_cast<long>(res.members.size())},
            {"r", res.r},
            {"delta", res.delta}};
}

json point_json(const Point& p) { return {p.x, p.y}; }

json check_json(const ReturnCheckRecord& rec) {
    return {{"index", rec.index},
            {"m", rec.m},
            {"rect_from", rec.rect_from},
            {"rect_to", rec.rect_to},
            {"component_escaped", rec.component_escaped},
            {"stable_admissible", rec.stable_admissible},
            {"unstable_admissible", rec.unstable_admissible},
            {"max_diameter_ratio", rec.max_diameter_ratio},
            {"jacobian_deviation", rec.jacobian_deviation},
            {"item5_ok", rec.item5_ok}};
}

json horseshoe_json(const HorseshoeDescription& desc) {
    json ledger = json::array();
    for (const Theorem1Item& it : desc.ledger.items)
        ledger.push_back({{"name", it.name},
                          {"pass", it.pass},
                          {"value", it.value},
                          {"bound_low", it.bound_low},
                          {"bound_high", it.bound_high},
                          {"note", it.note}});
    json checks = json::array();
    for (const ReturnCheckRecord& rec : desc.checks) checks.push_back(check_json(rec));
    json points = json::array();
    for (const Point& p : desc.symbol_points) points.push_back(point_json(p));
    return {{"base_index", desc.base_index},
            {"m", desc.m},
            {"symbol_indices", desc.symbol_indices},
            {"symbol_points", points},
            {"entropy", desc.entropy},
            {"mixing_certified", desc.mixing_certified},
            {"hat_iterates", desc.hat_iterates},
            {"cover_size", desc.cover_size},
            {"epsilon", desc.epsilon},
            {"n", desc.n},
            {"overlap_dropped", desc.overlap_dropped},
            {"checks", checks},
            {"ledger", ledger}};
}

json config_json(const PipelineConfig& c) {
    return {{"system", c.system},
            {"params", c.params},
            {"seed", c.seed},
            {"burn_in", c.burn_in},
            {"orbit_length", c.orbit_length},
            {"delta", c.delta},
            {"r", c.r},
            {"gamma", c.gamma},
            {"e_target", c.e_target},
            {"epsilon0", c.epsilon0},
            {"epsilon1", c.epsilon1},
            {"epsilon", c.epsilon},
            {"rho0", c.rho0},
            {"rho", c.rho},
            {"lipschitz", c.lipschitz},
            {"truncation", c.truncation},
            {"horizon", c.horizon},
            {"block_level", c.block_level},
            {"n", c.n},
            {"n_cap", c.n_cap},
            {"return_ratio", c.return_ratio},
            {"selection_r", c.selection_r},
            {"selection_grid", c.selection_grid},
            {"gamma_e_grid", c.gamma_e_grid},
            {"recurrence_grid", c.recurrence_grid},
            {"max_candidates", c.max_candidates},
            {"gamma_e_probes", c.gamma_e_probes},
            {"basis_terms", c.basis_terms},
            {"proximity_samples", c.proximity_samples},
            {"trace_grid", c.trace_grid},
            {"depth", c.depth},
            {"tol_nest", c.tol_nest},
            {"epsilon_nest", c.epsilon_nest},
            {"m_max_nest", c.m_max_nest},
            {"nest_max_candidates", c.nest_max_candidates}};
}

std::ofstream open_or_throw(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoFailureError("cannot open '" + path + "' for writing");
    return out;
}

std::vector<long> parse_long_list(const std::string& key, const std::string& value) {
    std::vector<long> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stol(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': '" + item + "' is not an integer");
        }
    }
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': '" + value + "' is not a number");
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': '" + value + "' is not an integer");
    }
}

std::string trim(const std::string& s) {
    const auto lo = s.find_first_not_of(" \t\r");
    if (lo == std::string::npos) return "";
    const auto hi = s.find_last_not_of(" \t\r");
    return s.substr(lo, hi - lo + 1);
}

}  // namespace

json report_to_json(const RunReport& report) {
    json out;
    out["config"] = config_json(report.config);
    out["spectrum"] = {{"chi", report.chi},
                       {"chi_plus_sum", report.chi_plus_sum},
                       {"h_estimate", report.h_estimate}};
    out["n"] = {{"initial", report.n_initial},
                {"final", report.n_final},
                {"threshold_required", report.threshold_required}};
    json gamma_b = json::array();
    for (const auto& [name, res] : report.gamma_b)
        gamma_b.push_back({{"observable", name}, {"result", selection_json(res)}});
    out["selections"] = {{"gamma_j", selection_json(report.gamma_j)},
                         {"gamma_b", gamma_b},
                         {"gamma_b_phiu", selection_json(report.gamma_b_phiu)},
                         {"gamma_e", selection_json(report.gamma_e)},
                         {"gamma_r", selection_json(report.gamma_r)},
                         {"gamma_prime_size", report.gamma_prime_size}};
    out["block"] = {{"size", report.block_size}, {"fraction", report.block_fraction}};
    out["cover"] = {{"size", report.cover_size},
                    {"rho", report.cover_rho},
                    {"lambda", report.cover_lambda},
                    {"partition_cells", report.partition_cells}};
    out["separated"] = {{"candidates", report.candidate_count},
                        {"size", report.separated.size()},
                        {"n", report.separated.n},
                        {"epsilon", report.separated.epsilon},
                        {"card_lower_ok", report.card_lower_ok},
                        {"card_upper_ok", report.card_upper_ok}};
    json bucket_counts = json::object();
    for (const auto& [k, count] : report.bucket_counts)
        bucket_counts[std::to_string(k)] = count;
    out["buckets"] = {{"total", report.bucket_total},
                      {"dropped", report.bucket_dropped},
                      {"window_lo", report.window_lo},
                      {"window_hi", report.window_hi},
                      {"counts", bucket_counts},
                      {"m", report.m},
                      {"f_m_size", report.f_m_size},
                      {"pigeonhole_ok", report.pigeonhole_ok}};
    out["weak_star"] = {{"K", report.K}, {"r0", report.r0}};
    out["horseshoe"] = horseshoe_json(report.horseshoe);
    json pressure = json::array();
    for (const auto& [name, res] : report.pressure_table)
        pressure.push_back({{"observable", name},
                            {"pressure", res.pressure},
                            {"integral", res.integral},
                            {"margin_low", res.margin_low},
                            {"margin_high", res.margin_high},
                            {"proof_window", res.proof_window},
                            {"strong", res.strong}});
    out["pressure"] = pressure;
    json stages = json::array();
    for (const NestedStage& st : report.nested.stages)
        stages.push_back({{"e_i", st.e_i},
                          {"r_i", st.r_i},
                          {"achieved", st.achieved},
                          {"zeta", st.zeta},
                          {"contained", st.contained},
                          {"horseshoe", horseshoe_json(st.desc)}});
    out["nested"] = {{"e", report.nested.e}, {"stages", stages}};
    return out;
}

void write_report_json(const RunReport& report, const std::string& path) {
    auto out = open_or_throw(path);
    out << report_to_json(report).dump(2) << "\n";
    if (!out) throw IoFailureError("failed writing '" + path + "'");
}

void write_report_csv(const RunReport& report, const std::string& dir) {
    {
        auto out = open_or_throw(dir + "/separated.csv");
        out << "orbit_index,x,y\n";
        out.precision(17);
        for (long i = 0; i < report.separated.size(); ++i)
            out << report.separated.indices[static_cast<std::size_t>(i)] << ","
                << report.separated.points[static_cast<std::size_t>(i)].x << ","
                << report.separated.points[static_cast<std::size_t>(i)].y << "\n";
    }
    {
        auto out = open_or_throw(dir + "/symbols.csv");
        out << "orbit_index,x,y\n";
        out.precision(17);
        for (std::size_t i = 0; i < report.horseshoe.symbol_points.size(); ++i)
            out << report.horseshoe.symbol_indices[i] << "," << report.horseshoe.symbol_points[i].x
                << "," << report.horseshoe.symbol_points[i].y << "\n";
    }
    {
        auto out = open_or_throw(dir + "/traced.csv");
        out << "orbit_index,m,rect_from,rect_to,component_escaped,stable_admissible,"
               "unstable_admissible,max_diameter_ratio,jacobian_deviation,item5_ok\n";
        out.precision(17);
        for (const ReturnCheckRecord& rec : report.horseshoe.checks)
            out << rec.index << "," << rec.m << "," << rec.rect_from << "," << rec.rect_to << ","
                << rec.component_escaped << "," << rec.stable_admissible << ","
                << rec.unstable_admissible << "," << rec.max_diameter_ratio << ","
                << rec.jacobian_deviation << "," << rec.item5_ok << "\n";
    }
    {
        auto out = open_or_throw(dir + "/buckets.csv");
        out << "k,count\n";
        for (const auto& [k, count] : report.bucket_counts) out << k << "," << count << "\n";
    }
    {
        auto out = open_or_throw(dir + "/dropped.csv");
        out << "orbit_index\n";
        for (long idx : report.dropped_indices) out << idx << "\n";
    }
    {
        auto out = open_or_throw(dir + "/ledger.csv");
        out << "item,pass,value,bound_low,bound_high,note\n";
        out.precision(17);
        for (const Theorem1Item& it : report.horseshoe.ledger.items)
            out << it.name << "," << it.pass << "," << it.value << "," << it.bound_low << ","
                << it.bound_high << ",\"" << it.note << "\"\n";
    }
    {
        auto out = open_or_throw(dir + "/pressure.csv");
        out << "observable,pressure,integral,margin_low,margin_high,proof_window,strong\n";
        out.precision(17);
        for (const auto& [name, res] : report.pressure_table)
            out << name << "," << res.pressure << "," << res.integral << "," << res.margin_low
                << "," << res.margin_high << "," << res.proof_window << "," << res.strong << "\n";
    }
    {
        auto out = open_or_throw(dir + "/selections.csv");
        out << "name,threshold_n,fraction,size,r,delta\n";
        out.precision(17);
        auto row = [&](const std::string& name, const SelectionResult& res) {
            out << name << "," << res.threshold_n << "," << res.fraction << ","
                << res.members.size() << "," << res.r << "," << res.delta << "\n";
        };
        row("gamma_j", report.gamma_j);
        for (const auto& [name, res] : report.gamma_b) row("gamma_b:" + name, res);
        row("gamma_b:phi_u", report.gamma_b_phiu);
        row("gamma_e", report.gamma_e);
        row("gamma_r", report.gamma_r);
    }
    {
        auto out = open_or_throw(dir + "/stages.csv");
        out << "stage,e_i,r_i,achieved,zeta,symbols,m,contained\n";
        out.precision(17);
        for (std::size_t s = 0; s < report.nested.stages.size(); ++s) {
            const NestedStage& st = report.nested.stages[s];
            out << s + 1 << "," << st.e_i << "," << st.r_i << "," << st.achieved << "," << st.zeta
                << "," << st.desc.symbol_count() << "," << st.desc.m << "," << st.contained
                << "\n";
        }
    }
}

PipelineConfig parse_config_text(const std::string& text) {
    PipelineConfig c;
    std::stringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line '" + line + "' is not key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line '" + line + "' has an empty key or value");

        if (key.rfind("params.", 0) == 0) {
            c.params[key.substr(7)] = parse_double(key, value);
        } else if (key == "system") {
            c.system = value;
        } else if (key == "seed") {
            c.seed = static_cast<std::uint64_t>(parse_long(key, value));
        } else if (key == "burn_in") {
            c.burn_in = parse_long(key, value);
        } else if (key == "orbit_length") {
            c.orbit_length = parse_long(key, value);
        } else if (key == "delta") {
            c.delta = parse_double(key, value);
        } else if (key == "r") {
            c.r = parse_double(key, value);
        } else if (key == "gamma") {
            c.gamma = parse_double(key, value);
        } else if (key == "e_target") {
            c.e_target = parse_double(key, value);
        } else if (key == "epsilon0") {
            c.epsilon0 = parse_double(key, value);
        } else if (key == "epsilon1") {
            c.epsilon1 = parse_double(key, value);
        } else if (key == "epsilon") {
            c.epsilon = parse_double(key, value);
        } else if (key == "rho0") {
            c.rho0 = parse_double(key, value);
        } else if (key == "rho") {
            c.rho = parse_double(key, value);
        } else if (key == "lipschitz") {
            c.lipschitz = parse_double(key, value);
        } else if (key == "truncation") {
            c.truncation = parse_long(key, value);
        } else if (key == "horizon") {
            c.horizon = parse_long(key, value);
        } else if (key == "block_level") {
            c.block_level = static_cast<int>(parse_long(key, value));
        } else if (key == "n") {
            c.n = parse_long(key, value);
        } else if (key == "n_cap") {
            c.n_cap = parse_long(key, value);
        } else if (key == "return_ratio") {
            c.return_ratio = parse_double(key, value);
        } else if (key == "selection_r") {
            c.selection_r = parse_double(key, value);
        } else if (key == "selection_grid") {
            c.selection_grid = parse_long_list(key, value);
        } else if (key == "gamma_e_grid") {
            c.gamma_e_grid = parse_long_list(key, value);
        } else if (key == "recurrence_grid") {
            c.recurrence_grid = parse_long_list(key, value);
        } else if (key == "max_candidates") {
            c.max_candidates = parse_long(key, value);
        } else if (key == "gamma_e_probes") {
            c.gamma_e_probes = parse_long(key, value);
        } else if (key == "basis_terms") {
            c.basis_terms = parse_long(key, value);
        } else if (key == "proximity_samples") {
            c.proximity_samples = parse_long(key, value);
        } else if (key == "trace_grid") {
            c.trace_grid = static_cast<int>(parse_long(key, value));
        } else if (key == "depth") {
            c.depth = parse_long(key, value);
        } else if (key == "tol_nest") {
            c.tol_nest = parse_double(key, value);
        } else if (key == "epsilon_nest") {
            c.epsilon_nest = parse_double(key, value);
        } else if (key == "m_max_nest") {
            c.m_max_nest = parse_long(key, value);
        } else if (key == "nest_max_candidates") {
            c.nest_max_candidates = parse_long(key, value);
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    }
    c.validate();
    return c;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailureError("cannot open config '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string config_schema() {
    return "system=cat                 # built-in map name\n"
           "# params.<name>=<value>    # system parameter, e.g. params.kappa=0.02\n"
           "seed=7                     # orbit seed\n"
           "burn_in=1000               # discarded leading iterates\n"
           "orbit_length=200000        # master orbit length\n"
           "delta=0.15                 # measure slack, in (0, 1/5)\n"
           "r=0.1                      # proof margin, in (0, min{h, chi/3})\n"
           "gamma=0.2                  # temperedness rate, in (0, chi/3)\n"
           "e_target=0.5               # target entropy\n"
           "epsilon0=0.5               # modulus-of-continuity scale\n"
           "epsilon1=0.4               # rectangle diameter bound\n"
           "epsilon=0.12               # Bowen separation scale\n"
           "rho0=0.4                   # chart size parameter\n"
           "rho=0.09                   # inner covering radius\n"
           "lipschitz=0.4              # admissibility constant L\n"
           "truncation=100             # Lyapunov inner-product truncation\n"
           "horizon=50                 # C1/C2 estimation horizon\n"
           "block_level=1              # Pesin block level\n"
           "n=10                       # initial separation time\n"
           "n_cap=640                  # escalation cap for n\n"
           "return_ratio=0.5           # return window [n, n(1+ratio))\n"
           "selection_r=0.4            # slack for the selection sweeps\n"
           "selection_grid=8,16,32     # Gamma_J / Gamma_B n-grid\n"
           "gamma_e_grid=6,8           # Gamma_E n-grid\n"
           "recurrence_grid=500,1000,2000  # Gamma_R n-grid\n"
           "max_candidates=30000       # separated-set candidate cap\n"
           "gamma_e_probes=50          # Gamma_E probe count (>= 30)\n"
           "basis_terms=8              # test-function count\n"
           "proximity_samples=8000     # support-check subsample\n"
           "trace_grid=25              # component-tracing grid\n"
           "depth=1                    # nesting depth\n"
           "tol_nest=0.05              # per-stage entropy window slack\n"
           "epsilon_nest=0.001         # nesting separation scale\n"
           "m_max_nest=12              # nesting return times in [2, m_max_nest)\n"
           "nest_max_candidates=1000000 # nesting candidate cap\n";
}

}  // namespace katok
