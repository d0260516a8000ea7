#pragma once

// From (p_err, chi) to thresholds, failure probabilities and signature length.

#include <cstdint>
#include <limits>

#include "cvqds/channel_attacks.hpp"

namespace cvqds {

/// h(p) = -p log2 p - (1-p) log2 (1-p), h(0) = h(1) = 0.
double binary_entropy(double p);

/// Root in [0, 1/2] of h(p) = y, by bisection to 1e-12. Requires y in [0, 1].
double inverse_binary_entropy(double y);

/// Smallest mismatch rate any forger can achieve: h^-1(max(0, 1 - chi)) on
/// the lower branch; 0 once chi >= 1. Throws InvalidArgument for chi < 0.
double forger_mismatch_bound(double chi);

struct Thresholds {
    double s_b = 0.0;
    double s_c = 0.0;
};

/// s_B = p_err + g/4, s_C = p_err + 3g/4 with g = p_e - p_err, which makes
/// the three failure exponents equal. Throws NoSecurity when g <= 0.
Thresholds thresholds(double p_err, double p_e);

/// 2 exp(-(s - p_err)^2 L). Throws BoundInapplicable unless s > p_err.
double eps_rob(double s, double p_err, std::int64_t length);

/// 2 exp(-(s_C - s_B)^2 L / 4). Throws BoundInapplicable unless s_C > s_B.
double eps_rep(double s_b, double s_c, std::int64_t length);

/// 2 exp(-(p_e - s_C)^2 L). Throws BoundInapplicable unless p_e > s_C.
double eps_forg(double p_e, double s_c, std::int64_t length);

/// Overall failure bound 2 exp(-g^2 L / 16).
double eps_fail_bound(double gap, std::int64_t length);

/// Smallest even L with 2 exp(-g^2 L / 16) <= eps_fail. Throws NoSecurity
/// for g <= 0 and InvalidArgument unless 0 < eps_fail < 1.
std::int64_t signature_length(double gap, double eps_fail);

/// exp(-2 deviation^2 n): one-sided Hoeffding tail for the mean of n
/// independent [0, 1] outcomes.
double hoeffding_upper(std::int64_t n, double deviation);

/// log2 of a factorial, via lgamma.
double log2_factorial(int n);

/// log2(N (N/2)!) - log2((N/2) (N/2)!): the constant in the entropy chain
/// bounding a forger; equals 1 for every even N.
double entropy_chain_constant(int alphabet_size);

struct SecurityResult {
    double p_err = 0.0;
    double chi = 0.0;
    double p_e = 0.0;
    double gap = 0.0;
    /// Meaningful only when secure().
    Thresholds thresholds;
    double eps_rob = 1.0;
    double eps_rep = 1.0;
    double eps_forg = 1.0;
    double eps_fail = 1.0;
    /// kInsecureLength when the gap is not positive or L is unrepresentable.
    std::int64_t length = 0;

    static constexpr std::int64_t kInsecureLength = std::numeric_limits<std::int64_t>::max();
    bool secure() const noexcept { return length != kInsecureLength; }
};

/// p_err, chi, p_e, gap, thresholds, L and the failure probabilities at L.
/// An insecure point (gap <= 0) is returned with length = kInsecureLength, as
/// is a positive gap whose L would overflow 64 bits.
SecurityResult analyze(const Channel& channel, const Alphabet& alphabet, double eps_fail);

/// Same composition from an already computed (p_err, chi).
SecurityResult analyze_rates(double p_err, double chi, double eps_fail);

}  // namespace cvqds
