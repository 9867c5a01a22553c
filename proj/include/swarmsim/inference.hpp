#pragma once

#include <cstdint>
#include <optional>

namespace swarmsim {

// Beta posterior over the arena fill ratio. alpha counts white evidence,
// beta counts black evidence (prior pseudo-counts included).
struct Belief {
    double alpha = 0.0;
    double beta = 0.0;
};

// Conjugate update: white increments alpha, black increments beta. The same
// rule applies to own observations and to colors received over the radio.
inline Belief update_belief(Belief b, int color) {
    b.alpha += color;
    b.beta += 1 - color;
    return b;
}

// Regularized incomplete beta I_x(a, b), a > 0 and b > 0.
double regularized_incomplete_beta(double a, double b, double x);

// P(f < theta) under Beta(alpha, beta).
//
// Degenerate one-sided counts are treated as the weak limits of the Beta
// family: Beta(a, 0) concentrates at 1 (cdf 0 below 1) and Beta(0, b)
// concentrates at 0 (cdf 1 above 0). Only alpha = beta = 0 carries no
// information at all and yields nullopt (not ready).
std::optional<double> cdf_at_theta(const Belief& b, double theta);

// Posterior mean alpha / (alpha + beta); nullopt when both counts are zero.
std::optional<double> expected_fill(const Belief& b);

enum class Decision : int { Undecided = -1, Black = 0, White = 1 };

struct DecisionConstants {
    double theta = 0.5;  // fill threshold for this task
    double p_c = 0.998;  // credibility threshold, in (0.5, 1)
    int h = 0;           // hysteresis: extra observations required after crossing
};

struct DecisionState {
    Decision d_f = Decision::Undecided;
    std::int64_t o_total = 0;            // observations integrated so far
    std::int64_t o_i = 0;                // o_total snapshot when pending side appeared
    Decision pending = Decision::Undecided;  // side currently favored, if any
};

// One evaluation of the classification rule against posterior mass p.
// p > p_c favors Black, (1 - p) > p_c favors White, anything else breaks the
// hysteresis streak. The decision flag is only (re)set once the favored side
// has held for at least h observations since it first appeared; it can flip
// later only through the same mechanism. Returns true when d_f changed.
bool update_decision(DecisionState& ds, double p, const DecisionConstants& consts);

}  // namespace swarmsim
