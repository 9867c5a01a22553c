#include "swarmsim/inference.hpp"

#include <cmath>
#include <stdexcept>

namespace swarmsim {

namespace {

// Continued fraction for the incomplete beta (modified Lentz). Converges in
// well under 200 iterations for the count magnitudes a full run can produce.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 10000;
    constexpr double kEps = 3.0e-16;
    constexpr double kFpMin = 1.0e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("regularized_incomplete_beta requires a > 0 and b > 0");
    }
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

std::optional<double> cdf_at_theta(const Belief& b, double theta) {
    const bool has_white = b.alpha > 0.0;
    const bool has_black = b.beta > 0.0;
    if (!has_white && !has_black) return std::nullopt;
    if (!has_black) return 0.0;  // all mass at f = 1
    if (!has_white) return 1.0;  // all mass at f = 0
    return regularized_incomplete_beta(b.alpha, b.beta, theta);
}

std::optional<double> expected_fill(const Belief& b) {
    const double total = b.alpha + b.beta;
    if (total <= 0.0) return std::nullopt;
    return b.alpha / total;
}

bool update_decision(DecisionState& ds, double p, const DecisionConstants& consts) {
    Decision favored = Decision::Undecided;
    if (p > consts.p_c) {
        favored = Decision::Black;
    } else if (1.0 - p > consts.p_c) {
        favored = Decision::White;
    }

    if (favored == Decision::Undecided) {
        // Credibility condition lapsed: hysteresis broken, streak cleared.
        ds.pending = Decision::Undecided;
        ds.o_i = 0;
        return false;
    }
    if (ds.pending != favored) {
        ds.pending = favored;
        ds.o_i = ds.o_total;
    }
    if (ds.o_total - ds.o_i >= consts.h && ds.d_f != favored) {
        ds.d_f = favored;
        return true;
    }
    return false;
}

}  // namespace swarmsim
