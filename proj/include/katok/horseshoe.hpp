#pragma once

#include <map>
#include <string>
#include <vector>

#include "katok/entropy.hpp"
#include "katok/measures.hpp"
#include "katok/regularity.hpp"
#include "katok/statistics.hpp"

namespace katok {

// Separated points grouped by their first return time into their own
// partition cell intersected with the target index set.
struct ReturnBuckets {
    long n = 0;
    double r = 0.0;
    long window_lo = 0;  // n
    long window_hi = 0;  // floor(n(1+r)), exclusive
    std::map<long, std::vector<long>> buckets;  // k -> orbit indices of F_k
    long dropped = 0;

    long total() const;
};

struct Theorem1Item {
    std::string name;
    bool pass = false;
    double value = 0.0;       // the measured quantity
    double bound_low = 0.0;   // active bounds (0 when one-sided)
    double bound_high = 0.0;
    std::string note;
};

struct Theorem1Ledger {
    std::vector<Theorem1Item> items;
    bool all_pass() const;
    const Theorem1Item& find(const std::string& name) const;
};

// Full shift on N symbols at step m: the finite description of Gamma.
struct HorseshoeDescription {
    long base_index = -1;              // cover rectangle index i
    long m = 0;                        // return time (step of the shift)
    std::vector<long> symbol_indices;  // master-orbit indices of the symbols
    std::vector<Point> symbol_points;
    double entropy = 0.0;              // log(N)/m exactly
    bool mixing_certified = false;     // all-ones transition matrix
    long hat_iterates = 0;             // m, for Gamma-hat = union of f^k(Gamma)
    long cover_size = 0;               // ell at assembly time
    double epsilon = 0.0;              // separation scale of the source set
    long n = 0;                        // separation time of the source set
    long overlap_dropped = 0;          // symbols pruned by the disjointness pass
    std::vector<ReturnCheckRecord> checks;
    Theorem1Ledger ledger;

    long symbol_count() const { return static_cast<long>(symbol_points.size()); }
};

struct NestedStage {
    HorseshoeDescription desc;
    double e_i = 0.0;      // stage target entropy
    double r_i = 0.0;
    double achieved = 0.0; // h_i
    double zeta = 0.0;     // h_i - e
    bool contained = true; // symbol points inside the previous stage's rectangle
};

struct NestedSequence {
    double e = 0.0;
    std::vector<NestedStage> stages;
};

// Each x in E goes to F_k for the smallest k in [n, floor(n(1+r))) with
// f^k(x) in the cell of x and orbit index x+k in the target set.
ReturnBuckets bucket_by_return(const SeparatedSet& E, const OrbitSegment& orbit,
                               const Partition& partition, const std::vector<long>& target, long n,
                               double r);

// m = argmax_k card F_k, smallest k on ties.
long select_return_time(const ReturnBuckets& buckets);

// i = argmax over cover indices of card(F_m intersect cell(x_i)), smallest
// index on ties; returns (index, member orbit indices). The winning members
// all share the cell of the center x_i, hence lie inside B(x_i, rho).
std::pair<long, std::vector<long>> select_base_rectangle(const std::vector<long>& f_m,
                                                         const OrbitSegment& orbit,
                                                         const Partition& partition,
                                                         const RectangleCover& cover);

HorseshoeDescription assemble_horseshoe(const SystemSpec& system, const OrbitSegment& orbit,
                                        const SplittingField& field, const RectangleCover& cover,
                                        long base_index, const std::vector<long>& symbol_indices,
                                        long m, double r, int grid = 25);

struct Theorem1Config {
    double e_target = 0.0;
    double r = 0.0;
    double delta = 0.0;
    double chi_plus_sum = 0.0;  // sum of positive exponents, for item vi
    long weak_star_terms = 8;
    long proximity_samples = 2000;  // master-orbit subsample for item ii
};

Theorem1Ledger verify_theorem1(const SystemSpec& system, HorseshoeDescription& desc,
                               const OrbitSegment& orbit, const SplittingField& field,
                               const TestBasis& basis, const Theorem1Config& config);

// Uniform Bernoulli measure on the shift model realized as the empirical
// measure of the symbol points' m-step orbit segments.
EmpiricalMeasure horseshoe_measure(const SystemSpec& system, const HorseshoeDescription& desc);

}  // namespace katok
