#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "katok/horseshoe.hpp"

namespace katok {

// Full parameter set of a run. Structural constraints are enforced by
// validate(); constraints that need the measured spectrum (r and gamma vs
// chi/3, e vs the entropy estimate) are re-checked once the spectrum exists.
struct PipelineConfig {
    std::string system = "cat";
    std::map<std::string, double> params;
    std::uint64_t seed = 7;
    long burn_in = 1000;
    long orbit_length = 200000;

    double delta = 0.15;     // in (0, 1/5)
    double r = 0.1;          // proof margin, in (0, min{h estimate, chi/3})
    double gamma = 0.2;      // temperedness rate, in (0, chi/3)
    double e_target = 0.5;   // target entropy, in (0, h estimate]

    double epsilon0 = 0.5;   // modulus-of-continuity scale
    double epsilon1 = 0.4;   // rectangle diameter bound
    double epsilon = 0.12;   // Bowen separation scale; epsilon < epsilon1 < epsilon0

    double rho0 = 0.4;       // chart size parameter
    double rho = 0.09;       // inner covering radius request
    double lipschitz = 0.4;  // admissibility constant L
    long truncation = 100;   // Lyapunov inner-product truncation
    long horizon = 50;       // C_1/C_2 estimation horizon
    int block_level = 1;     // Pesin block level

    long n = 10;             // initial separation time, doubled up to n_cap
    long n_cap = 640;
    double return_ratio = 0.5;              // return window [n, n(1+ratio))
    double selection_r = 0.4;               // desk slack for the selection sweeps
    std::vector<long> selection_grid = {8, 16, 32};     // Gamma_J / Gamma_B n-grid
    std::vector<long> gamma_e_grid = {6, 8};            // Gamma_E n-grid
    std::vector<long> recurrence_grid = {500, 1000, 2000};  // Gamma_R n-grid
    long max_candidates = 30000;            // separated-set candidate cap
    long gamma_e_probes = 50;

    long basis_terms = 8;         // test-function count (raised to K when needed)
    long proximity_samples = 8000;  // master-orbit subsample for support checks
    int trace_grid = 25;          // component-tracing grid

    long depth = 1;               // nesting depth
    double tol_nest = 0.05;       // slack on the per-stage entropy window
    double epsilon_nest = 0.001;  // separation scale of the nesting stages
    long m_max_nest = 12;         // nesting stages use return times in [2, m_max_nest)
    long nest_max_candidates = 1000000;

    void validate() const;  // throws ConfigError naming the parameter and range
};

struct StageTiming {
    std::string stage;
    double milliseconds = 0.0;
};

struct RunReport {
    PipelineConfig config;

    double chi = 0.0;
    double chi_plus_sum = 0.0;
    double h_estimate = 0.0;

    long n_initial = 0;
    long n_final = 0;
    long threshold_required = 0;

    SelectionResult gamma_j, gamma_b_phiu, gamma_e, gamma_r;
    std::vector<std::pair<std::string, SelectionResult>> gamma_b;
    long gamma_prime_size = 0;
    long block_size = 0;
    double block_fraction = 0.0;

    long cover_size = 0;
    double cover_rho = 0.0;
    double cover_lambda = 0.0;
    long partition_cells = 0;

    long candidate_count = 0;
    SeparatedSet separated;
    bool card_lower_ok = false;
    bool card_upper_ok = false;

    long bucket_total = 0;
    long bucket_dropped = 0;
    long window_lo = 0;
    long window_hi = 0;
    std::map<long, long> bucket_counts;
    std::vector<long> dropped_indices;
    long m = 0;
    long f_m_size = 0;
    bool pigeonhole_ok = false;

    long K = 0;
    double r0 = 0.0;

    HorseshoeDescription horseshoe;
    std::vector<std::pair<std::string, ItemVResult>> pressure_table;

    NestedSequence nested;  // filled by run_nest only

    std::vector<StageTiming> timing;  // excluded from serialized reports
};

// Theorem 1 end to end: master orbit, spectrum and splittings, selection
// lemmas, cover, separated set, return buckets, assembly, verification.
RunReport run_extract(const PipelineConfig& config);

// Theorem 2: nested sequence of horseshoes with decreasing entropies above
// config.e_target, depth config.depth.
RunReport run_nest(const PipelineConfig& config);

// The nesting loop on an already sampled orbit.
NestedSequence nest_entropy_sequence(const SystemSpec& system, const OrbitSegment& orbit, double e,
                                     long depth, const PipelineConfig& config);

}  // namespace katok
