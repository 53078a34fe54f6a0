#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "katok/errors.hpp"
#include "katok/pipeline.hpp"
#include "katok/report_io.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    long seed = -1;
    bool want_json = false;
    bool want_csv = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--config", opt.config_path, "configuration file (key=value lines)");
    cmd->add_option("--seed", opt.seed, "override the config's orbit seed");
    cmd->add_option("--out", opt.out_dir, "output directory for reports");
    cmd->add_flag("--json", opt.want_json, "write report.json under --out");
    cmd->add_flag("--csv", opt.want_csv, "write CSV tables under --out");
}

katok::PipelineConfig resolve_config(const CommonOptions& opt) {
    katok::PipelineConfig config =
        opt.config_path.empty() ? katok::PipelineConfig{} : katok::load_config(opt.config_path);
    if (opt.seed >= 0) config.seed = static_cast<std::uint64_t>(opt.seed);
    config.validate();
    return config;
}

void emit(const katok::RunReport& report, const CommonOptions& opt) {
    if (opt.out_dir.empty()) {
        std::cout << katok::report_to_json(report).dump(2) << "\n";
        return;
    }
    std::filesystem::create_directories(opt.out_dir);
    const bool json_wanted = opt.want_json || !opt.want_csv;
    if (json_wanted) katok::write_report_json(report, opt.out_dir + "/report.json");
    if (opt.want_csv) katok::write_report_csv(report, opt.out_dir);
    std::cout << "wrote report to " << opt.out_dir << "\n";
}

void print_timing(const katok::RunReport& report) {
    for (const katok::StageTiming& t : report.timing)
        std::cerr << "  " << t.stage << ": " << t.milliseconds << " ms\n";
}

int run_analyze(const CommonOptions& opt) {
    const katok::PipelineConfig config = resolve_config(opt);
    const katok::SystemSpec system = katok::make_system(config.system, config.params);
    const katok::OrbitSegment orbit =
        katok::sample_orbit(system, config.seed, config.burn_in, config.orbit_length);
    const katok::LyapunovSpectrum spec = katok::lyapunov_spectrum_qr(system, orbit);
    const katok::SplittingField field = katok::compute_splitting_field(system, orbit);
    std::vector<long> indices;
    for (long i = field.valid_from + config.horizon; i < field.valid_to - config.horizon - 100; ++i)
        indices.push_back(i);
    const auto est = katok::estimate_c1_c2(field, spec.chi, config.gamma, config.horizon, indices);
    const katok::PesinBlock block = katok::pesin_block(est, config.block_level);
    const katok::RectangleCover cover =
        katok::rectangle_cover(system, orbit, field, spec, block, config.gamma, config.rho0,
                               config.truncation, config.epsilon1, config.rho, config.lipschitz);

    nlohmann::json out = {{"system", config.system},
                          {"exponents", spec.exponents},
                          {"multiplicities", spec.multiplicities},
                          {"chi", spec.chi},
                          {"chi_plus_sum", spec.chi_plus_sum},
                          {"splitting_valid_from", field.valid_from},
                          {"splitting_valid_to", field.valid_to},
                          {"block_size", static_cast<long>(block.members.size())},
                          {"block_fraction", block.fraction},
                          {"cover_size", cover.size()},
                          {"cover_rho", cover.rho},
                          {"cover_lambda", cover.lambda}};
    if (opt.out_dir.empty()) {
        std::cout << out.dump(2) << "\n";
    } else {
        std::filesystem::create_directories(opt.out_dir);
        std::ofstream file(opt.out_dir + "/analyze.json");
        file << out.dump(2) << "\n";
        std::cout << "wrote analysis to " << opt.out_dir << "\n";
    }
    return 0;
}

int run_extract_cmd(const CommonOptions& opt) {
    const katok::RunReport report = katok::run_extract(resolve_config(opt));
    emit(report, opt);
    std::cerr << "horseshoe: N=" << report.horseshoe.symbol_count() << " m=" << report.m
              << " entropy=" << report.horseshoe.entropy
              << " ledger=" << (report.horseshoe.ledger.all_pass() ? "pass" : "fail") << "\n";
    print_timing(report);
    return report.horseshoe.ledger.all_pass() ? 0 : 2;
}

int run_nest_cmd(const CommonOptions& opt) {
    const katok::RunReport report = katok::run_nest(resolve_config(opt));
    emit(report, opt);
    for (std::size_t s = 0; s < report.nested.stages.size(); ++s) {
        const katok::NestedStage& st = report.nested.stages[s];
        std::cerr << "stage " << s + 1 << ": N=" << st.desc.symbol_count() << " m=" << st.desc.m
                  << " h=" << st.achieved << " target e_i=" << st.e_i << "\n";
    }
    print_timing(report);
    return 0;
}

int run_pressure_cmd(const CommonOptions& opt) {
    const katok::RunReport report = katok::run_extract(resolve_config(opt));
    std::cout << "observable,pressure,integral,margin_low,margin_high,proof_window,strong\n";
    for (const auto& [name, res] : report.pressure_table)
        std::cout << name << "," << res.pressure << "," << res.integral << "," << res.margin_low
                  << "," << res.margin_high << "," << res.proof_window << "," << res.strong
                  << "\n";
    if (!opt.out_dir.empty()) emit(report, opt);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constructive horseshoe extraction for smooth planar maps"};
    app.require_subcommand(1);

    CommonOptions analyze_opt, extract_opt, nest_opt, pressure_opt;
    CLI::App* analyze = app.add_subcommand("analyze", "spectrum, splittings, and regularity only");
    add_common(analyze, analyze_opt);
    CLI::App* extract = app.add_subcommand("extract", "full horseshoe extraction and verification");
    add_common(extract, extract_opt);
    CLI::App* nest = app.add_subcommand("nest", "nested sequence of decreasing-entropy horseshoes");
    add_common(nest, nest_opt);
    CLI::App* pressure = app.add_subcommand("pressure", "extraction plus the pressure table");
    add_common(pressure, pressure_opt);

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return run_analyze(analyze_opt);
        if (extract->parsed()) return run_extract_cmd(extract_opt);
        if (nest->parsed()) return run_nest_cmd(nest_opt);
        if (pressure->parsed()) return run_pressure_cmd(pressure_opt);
    } catch (const katok::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
