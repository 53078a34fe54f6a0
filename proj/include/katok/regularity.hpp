#pragma once

#include <functional>
#include <vector>

#include "katok/cocycle.hpp"
#include "katok/dynamics.hpp"

namespace katok {

// Empirical estimates of the tempered non-uniformity constants along an orbit.
struct TemperedFunctionEstimate {
    std::vector<long> indices;  // sampled orbit indices
    std::vector<double> c1;     // C_1(x) >= 1
    std::vector<double> c2;     // splitting angle in (0, pi/2]
    double gamma = 0.0;
};

struct PesinBlock {
    int level = 1;
    std::vector<long> members;  // orbit indices with C_1 <= level, C_2 >= 1/level
    double fraction = 0.0;
};

struct TemperednessResult {
    bool tempered = false;
    double worst_ratio = 0.0;  // max over offsets of value(f^n x) / (value(x) e^{gamma |n|})
};

struct LyapunovChart {
    long orbit_index = 0;
    Point center;
    Mat2 frame;          // C_gamma(x): standard basis -> (e^s, e^u), unit Lyapunov norm
    Mat2 frame_inv;
    double q = 0.0;      // chart size
    Mat2 linear_part;    // A_gamma(x) = C_gamma(f x)^{-1} df_x C_gamma(x)
    std::function<Vec2(const Vec2&)> lifted;  // F_x = chart(fx)^{-1} o f o chart(x)
};

// Rectangle R(x,h): image of [-h,h]^2 under chart frame scaled by q/sqrt(2).
struct Rectangle {
    Point center;
    Mat2 frame;
    Mat2 frame_inv;
    double q = 0.0;
    double h = 1.0;
    long orbit_index = 0;

    double scale() const;                                   // q / sqrt(dim)
    Vec2 to_chart(const Domain& dom, const Point& p) const;  // coords in [-h,h]^2 units
    Point from_chart(const Domain& dom, const Vec2& w) const;
    bool contains(const Domain& dom, const Point& p) const;
    double diameter() const;   // exact: longer diagonal of the parallelogram
    double inradius() const;   // largest rho with B(center, rho) inside
};

struct RectangleCover {
    std::vector<Rectangle> rectangles;
    std::vector<long> center_indices;
    double rho = 0.0;        // inner covering radius
    double lambda = 0.0;     // contraction rate, e^{-chi+gamma}
    double lipschitz = 0.0;  // admissibility constant L
    double epsilon1 = 0.0;   // diameter bound

    long size() const { return static_cast<long>(rectangles.size()); }
    // Smallest i with p in B(x_i, rho), or -1.
    long locate(const Domain& dom, const Point& p) const;
};

// Verification record for Lemma items 3-5 on one detected return.
struct ReturnCheckRecord {
    long index = 0;
    long m = 0;
    long rect_from = -1;
    long rect_to = -1;
    bool component_escaped = false;
    bool stable_admissible = false;    // item 3, L^s-rectangle side
    bool unstable_admissible = false;  // item 3, image L^u-rectangle side
    double max_diameter_ratio = 0.0;   // item 4: max_k diam_k / (3 diam R max{l^k, l^{m-k}})
    double jacobian_deviation = 0.0;   // item 5 left-hand side
    bool item5_ok = false;
};

struct DominationResult {
    bool dominated = false;
    double worst_ratio = 0.0;  // max over samples of ||df^N v_s|| / ||df^N v_u||
};

struct NHyperbolicityResult {
    double forward_average = 0.0;   // (1/lN) sum log ||df^N restricted to E^1||
    double backward_average = 0.0;  // backward analogue for E^2
    bool verdict = false;
};

// C_1 from the symmetric (H1) bounds over a finite horizon, C_2 = splitting angle.
TemperedFunctionEstimate estimate_c1_c2(const SplittingField& field, double chi, double gamma,
                                        long horizon, const std::vector<long>& indices);

TemperednessResult temperedness_check(const std::vector<double>& values, double gamma);

PesinBlock pesin_block(const TemperedFunctionEstimate& estimate, int level);

// Gram matrix of the Lyapunov inner product at orbit[index] in the (e^s, e^u) basis.
Mat2 lyapunov_inner_product(const SystemSpec& system, const OrbitSegment& orbit, long index,
                            const SplittingEstimate& splitting, const LyapunovSpectrum& spectrum,
                            double gamma, long truncation);

LyapunovChart lyapunov_chart(const SystemSpec& system, const OrbitSegment& orbit, long index,
                             const SplittingEstimate& splitting,
                             const SplittingEstimate& splitting_next,
                             const LyapunovSpectrum& spectrum, double gamma, double rho0,
                             long truncation = 200);

Rectangle rectangle(const LyapunovChart& chart, double h);

enum class ManifoldKind { Stable, Unstable };

// True iff the chart-coordinate samples are the graph of a function over the
// s- (resp. u-) axis with empirical Lipschitz constant <= L.
bool admissibility_check(const std::vector<Vec2>& graph_samples, ManifoldKind kind, double L);

RectangleCover rectangle_cover(const SystemSpec& system, const OrbitSegment& orbit,
                               const SplittingField& field, const LyapunovSpectrum& spectrum,
                               const PesinBlock& block, double gamma, double rho0, long truncation,
                               double epsilon1, double rho_requested, double lipschitz_L);

ReturnCheckRecord return_rectangle_check(const SystemSpec& system, const OrbitSegment& orbit,
                                         const SplittingField& field, const RectangleCover& cover,
                                         long index, long m, double r, int grid = 25);

DominationResult domination_check(const SystemSpec& system, const std::vector<Point>& samples,
                                  const std::vector<SplittingEstimate>& splittings, long N);

NHyperbolicityResult n_hyperbolicity_averages(const SplittingField& field, long N, double gamma,
                                              double chi);

}  // namespace katok
