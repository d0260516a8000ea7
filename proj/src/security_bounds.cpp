#include "cvqds/security_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cvqds/error.hpp"

namespace cvqds {

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("binary_entropy: p must lie in [0, 1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double inverse_binary_entropy(double y) {
    if (!(y >= 0.0 && y <= 1.0)) throw InvalidArgument("inverse_binary_entropy: y must lie in [0, 1]");
    if (y == 0.0) return 0.0;
    if (y == 1.0) return 0.5;
    double lo = 0.0;
    double hi = 0.5;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (binary_entropy(mid) < y) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double forger_mismatch_bound(double chi) {
    if (!(chi >= 0.0)) throw InvalidArgument("forger_mismatch_bound: chi must be >= 0");
    if (chi >= 1.0) return 0.0;
    return inverse_binary_entropy(1.0 - chi);
}

Thresholds thresholds(double p_err, double p_e) {
    const double gap = p_e - p_err;
    if (!(gap > 0.0)) {
        std::ostringstream os;
        os << "no security: p_e = " << p_e << " does not exceed p_err = " << p_err;
        throw NoSecurity(os.str());
    }
    return {p_err + gap / 4.0, p_err + 3.0 * gap / 4.0};
}

namespace {

void check_length(std::int64_t length) {
    if (length < 1) throw InvalidArgument("signature length must be >= 1");
}

}  // namespace

double eps_rob(double s, double p_err, std::int64_t length) {
    check_length(length);
    if (!(s > p_err)) throw BoundInapplicable("eps_rob needs s > p_err");
    const double d = s - p_err;
    return 2.0 * std::exp(-d * d * static_cast<double>(length));
}

double eps_rep(double s_b, double s_c, std::int64_t length) {
    check_length(length);
    if (!(s_c > s_b)) throw BoundInapplicable("eps_rep needs s_C > s_B");
    const double d = s_c - s_b;
    return 2.0 * std::exp(-d * d * static_cast<double>(length) / 4.0);
}

double eps_forg(double p_e, double s_c, std::int64_t length) {
    check_length(length);
    if (!(p_e > s_c)) throw BoundInapplicable("eps_forg needs p_e > s_C");
    const double d = p_e - s_c;
    return 2.0 * std::exp(-d * d * static_cast<double>(length));
}

double eps_fail_bound(double gap, std::int64_t length) {
    return 2.0 * std::exp(-gap * gap * static_cast<double>(length) / 16.0);
}

std::int64_t signature_length(double gap, double eps_fail) {
    if (!(eps_fail > 0.0 && eps_fail < 1.0)) {
        throw InvalidArgument("signature_length: eps_fail must lie in (0, 1)");
    }
    if (!(gap > 0.0)) throw NoSecurity("signature_length: gap must be positive");
    const double exact = 16.0 * std::log(2.0 / eps_fail) / (gap * gap);
    if (!(exact < 9e18)) throw NumericError("signature_length: L overflows a 64-bit integer");
    auto length = static_cast<std::int64_t>(std::ceil(exact));
    if (length % 2 != 0) ++length;
    return std::max<std::int64_t>(length, 2);
}

double hoeffding_upper(std::int64_t n, double deviation) {
    if (n < 1) throw InvalidArgument("hoeffding_upper: n must be >= 1");
    if (!(deviation >= 0.0)) throw InvalidArgument("hoeffding_upper: deviation must be >= 0");
    return std::exp(-2.0 * deviation * deviation * static_cast<double>(n));
}

double log2_factorial(int n) {
    if (n < 0) throw InvalidArgument("log2_factorial: n must be >= 0");
    return std::lgamma(n + 1.0) / std::log(2.0);
}

double entropy_chain_constant(int alphabet_size) {
    if (alphabet_size < 2 || alphabet_size % 2 != 0) {
        throw InvalidArgument("entropy_chain_constant: N must be even and >= 2");
    }
    const int half = alphabet_size / 2;
    return (std::log2(alphabet_size) + log2_factorial(half)) -
           (std::log2(half) + log2_factorial(half));
}

SecurityResult analyze_rates(double p_err, double chi, double eps_fail) {
    if (!(eps_fail > 0.0 && eps_fail < 1.0)) {
        throw InvalidArgument("analyze: eps_fail must lie in (0, 1)");
    }
    SecurityResult r;
    r.p_err = p_err;
    r.chi = chi;
    r.p_e = forger_mismatch_bound(chi);
    r.gap = r.p_e - p_err;
    // A gap so small that L does not fit in 64 bits is reported like g <= 0.
    if (!(r.gap > 0.0) || !(16.0 * std::log(2.0 / eps_fail) / (r.gap * r.gap) < 9e18)) {
        r.length = SecurityResult::kInsecureLength;
        return r;
    }
    r.thresholds = thresholds(p_err, r.p_e);
    r.length = signature_length(r.gap, eps_fail);
    r.eps_rob = eps_rob(r.thresholds.s_b, p_err, r.length);
    r.eps_rep = eps_rep(r.thresholds.s_b, r.thresholds.s_c, r.length);
    r.eps_forg = eps_forg(r.p_e, r.thresholds.s_c, r.length);
    r.eps_fail = std::max({r.eps_rob, r.eps_rep, r.eps_forg});
    return r;
}

SecurityResult analyze(const Channel& channel, const Alphabet& alphabet, double eps_fail) {
    return analyze_rates(p_err(channel, alphabet), holevo(channel, alphabet), eps_fail);
}

}  // namespace cvqds
