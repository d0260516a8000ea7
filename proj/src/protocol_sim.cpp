#include "cvqds/protocol_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cvqds/error.hpp"

namespace cvqds {

Recipient other(Recipient r) noexcept {
    return r == Recipient::kBob ? Recipient::kCharlie : Recipient::kBob;
}

Complex sample_heterodyne(int sent, const Channel& channel, const Alphabet& alphabet, Rng& rng) {
    const double sigma = std::sqrt(channel.quadrature_variance());
    const Complex mean = channel.charlie_mean(alphabet.state(sent));
    const double re = rng.normal();
    const double im = rng.normal();
    return mean + sigma * Complex(re, im);
}

namespace {

void check_length(std::int64_t length) {
    if (length < 2 || length % 2 != 0) throw InvalidArgument("signature length must be even and >= 2");
}

PrivateKey random_key(int message, Recipient recipient, std::int64_t length, int n, Rng& rng) {
    PrivateKey key{message, recipient, {}};
    key.phases.resize(static_cast<std::size_t>(length));
    for (int& p : key.phases) p = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    return key;
}

EliminatedList measure(const PrivateKey& key, const SimParams& params, Rng& rng) {
    EliminatedList out;
    out.reserve(key.phases.size());
    for (int k : key.phases) {
        out.push_back(eliminated_set(sample_heterodyne(k, params.channel, params.alphabet, rng),
                                     params.alphabet));
    }
    return out;
}

// First `count` entries of a uniformly random permutation of 0..n-1.
std::vector<int> random_subset(int n, int count, Rng& rng) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 0; i < count; ++i) {
        const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(static_cast<std::size_t>(count));
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace

MessageDistribution distribute_message(const SimParams& params, int message, Rng& rng) {
    check_length(params.length);
    const int n = params.alphabet.size();
    MessageDistribution d;
    d.key_b = random_key(message, Recipient::kBob, params.length, n, rng);
    d.key_c = random_key(message, Recipient::kCharlie, params.length, n, rng);
    d.bob = measure(d.key_b, params, rng);
    d.charlie = measure(d.key_c, params, rng);
    return d;
}

std::array<MessageDistribution, 2> run_distribution(const SimParams& params, Rng& rng) {
    MessageDistribution zero = distribute_message(params, 0, rng);
    MessageDistribution one = distribute_message(params, 1, rng);
    return {std::move(zero), std::move(one)};
}

std::pair<EliminatedSignature, EliminatedSignature> symmetrize(const EliminatedList& bob,
                                                               const EliminatedList& charlie,
                                                               Rng& rng) {
    if (bob.size() != charlie.size()) throw InvalidArgument("symmetrize: list lengths differ");
    const int length = static_cast<int>(bob.size());
    check_length(length);
    const int half = length / 2;

    const auto split = [&](const EliminatedList& list, std::vector<EliminatedEntry>& kept,
                           std::vector<EliminatedEntry>& sent) {
        std::vector<char> forwarded(static_cast<std::size_t>(length), 0);
        for (int p : random_subset(length, half, rng)) forwarded[p] = 1;
        for (int p = 0; p < length; ++p) {
            (forwarded[p] ? sent : kept).push_back({p, list[p]});
        }
    };

    EliminatedSignature for_bob{Recipient::kBob, {}, {}};
    EliminatedSignature for_charlie{Recipient::kCharlie, {}, {}};
    split(bob, for_bob.direct_half, for_charlie.swapped_half);
    split(charlie, for_charlie.direct_half, for_bob.swapped_half);
    return {std::move(for_bob), std::move(for_charlie)};
}

Verification verify(const SignatureDeclaration& declaration, const EliminatedSignature& signature,
                    double s, int alphabet_size) {
    const std::size_t half = signature.direct_half.size();
    if (signature.swapped_half.size() != half || half == 0) {
        throw MalformedDeclaration("signature halves must be nonempty and equally long");
    }
    const std::size_t length = 2 * half;
    if (declaration.phi_b.size() != length || declaration.phi_c.size() != length) {
        std::ostringstream os;
        os << "declaration keys have lengths " << declaration.phi_b.size() << " and "
           << declaration.phi_c.size() << ", signature expects " << length;
        throw MalformedDeclaration(os.str());
    }

    const auto count = [&](const std::vector<EliminatedEntry>& entries, const std::vector<int>& key) {
        int mismatches = 0;
        for (const auto& e : entries) {
            if (e.position < 0 || static_cast<std::size_t>(e.position) >= length) {
                throw MalformedDeclaration("signature position out of range");
            }
            const int k = key[static_cast<std::size_t>(e.position)];
            if (k < 0 || k >= alphabet_size) throw MalformedDeclaration("declared index out of range");
            if (e.eliminated.contains(k)) ++mismatches;
        }
        return mismatches;
    };

    Verification v;
    v.counts.direct = count(signature.direct_half, declaration.key_for(signature.owner));
    v.counts.swapped = count(signature.swapped_half, declaration.key_for(other(signature.owner)));
    // Exact test of count < s * half: the fma residual carries the rounding
    // error of the product, which decides the tie count == rounded product.
    const double limit = s * static_cast<double>(half);
    const double residual = std::fma(s, static_cast<double>(half), -limit);
    const auto below = [&](std::int64_t c) {
        const double cd = static_cast<double>(c);
        return cd < limit || (cd == limit && residual > 0.0);
    };
    v.accepted = below(v.counts.direct) && below(v.counts.swapped);
    return v;
}

SignatureDeclaration honest_declaration(const MessageDistribution& dist) {
    return {dist.key_b.message, dist.key_b.phases, dist.key_c.phases};
}

ProtocolOutcome run_verification(const SignatureDeclaration& declaration,
                                 const std::pair<EliminatedSignature, EliminatedSignature>& sigs,
                                 const SimParams& params) {
    const int n = params.alphabet.size();
    const Verification bob = verify(declaration, sigs.first, params.thresholds.s_b, n);
    const Verification charlie = verify(declaration, sigs.second, params.thresholds.s_c, n);
    return {bob.counts, charlie.counts, bob.accepted, charlie.accepted};
}

double FrequencyEstimate::frequency() const {
    return trials == 0 ? 0.0 : static_cast<double>(events) / static_cast<double>(trials);
}

double FrequencyEstimate::standard_error() const {
    if (trials == 0) return 0.0;
    const double f = frequency();
    return std::sqrt(f * (1.0 - f) / static_cast<double>(trials));
}

FrequencyEstimate& FrequencyEstimate::operator+=(const FrequencyEstimate& other) {
    trials += other.trials;
    events += other.events;
    return *this;
}

double statistical_slack(double bound, std::int64_t trials) {
    if (trials < 1) throw InvalidArgument("statistical_slack: trials must be >= 1");
    const double b = std::clamp(bound, 0.0, 1.0);
    return 3.0 * std::sqrt(b * (1.0 - b) / static_cast<double>(trials));
}

FrequencyEstimate simulate_honest(const SimParams& params, std::int64_t first, std::int64_t count,
                                  std::uint64_t seed) {
    FrequencyEstimate est;
    for (std::int64_t i = first; i < first + count; ++i) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
        const MessageDistribution dist = distribute_message(params, 0, rng);
        const auto sigs = symmetrize(dist.bob, dist.charlie, rng);
        const ProtocolOutcome out = run_verification(honest_declaration(dist), sigs, params);
        ++est.trials;
        if (!out.bob_accepts || !out.charlie_accepts) ++est.events;
    }
    return est;
}

FrequencyEstimate simulate_honest(const SimParams& params, std::int64_t trials, std::uint64_t seed) {
    return simulate_honest(params, 0, trials, seed);
}

RepudiationStrategy antipodal_flip(double flip_fraction) {
    if (!(flip_fraction >= 0.0 && flip_fraction <= 1.0)) {
        throw InvalidArgument("antipodal_flip: fraction must lie in [0, 1]");
    }
    return [flip_fraction](const AliceView& view, Rng& rng) {
        const int n = view.alphabet->size();
        const auto flip = [&](const std::vector<int>& phases) {
            std::vector<int> out = phases;
            const int length = static_cast<int>(out.size());
            const int count = static_cast<int>(std::lround(flip_fraction * length));
            for (int p : random_subset(length, count, rng)) out[p] = (out[p] + n / 2) % n;
            return out;
        };
        return SignatureDeclaration{view.message, flip(view.key_b->phases), flip(view.key_c->phases)};
    };
}

double antipodal_flip_rate(double flip_fraction, double p_err) {
    return (1.0 - flip_fraction) * p_err + flip_fraction * (1.0 - p_err);
}

double flip_fraction_for_rate(double rate, double p_err) {
    if (!(p_err < 0.5)) throw InvalidArgument("flip_fraction_for_rate: needs p_err < 1/2");
    return std::clamp((rate - p_err) / (1.0 - 2.0 * p_err), 0.0, 1.0);
}

FrequencyEstimate simulate_repudiation(const SimParams& params, const RepudiationStrategy& strategy,
                                       std::int64_t trials, std::uint64_t seed) {
    FrequencyEstimate est;
    for (std::int64_t i = 0; i < trials; ++i) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
        const MessageDistribution dist = distribute_message(params, 0, rng);
        // Alice commits to her declaration before the recipients symmetrize,
        // and from her own keys only.
        const AliceView view{0, &dist.key_b, &dist.key_c, &params.alphabet};
        const SignatureDeclaration declaration = strategy(view, rng);
        const auto sigs = symmetrize(dist.bob, dist.charlie, rng);
        const ProtocolOutcome out = run_verification(declaration, sigs, params);
        ++est.trials;
        if (out.bob_accepts && !out.charlie_accepts) ++est.events;
    }
    return est;
}

FrequencyEstimate simulate_repudiation(const SimParams& params, double flip_fraction,
                                       std::int64_t trials, std::uint64_t seed) {
    return simulate_repudiation(params, antipodal_flip(flip_fraction), trials, seed);
}

FrequencyEstimate simulate_forger_ml(const Channel& channel, const Alphabet& alphabet,
                                     std::int64_t positions, std::uint64_t seed) {
    if (channel.attack() != Attack::kBeamsplitter) {
        throw InvalidArgument("simulate_forger_ml models the beamsplitter attack only");
    }
    if (positions < 1) throw InvalidArgument("simulate_forger_ml: positions must be >= 1");
    const int n = alphabet.size();
    const Eigen::MatrixXd sector_given_state = sector_probability_table(channel, alphabet);
    // cost(k, d): probability that declaring d mismatches when k was sent.
    Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        const StateSet e = sector_eliminated_set(alphabet, Sector{j});
        for (int k = 0; k < n; ++k) {
            for (int d = 0; d < n; ++d) {
                if (e.contains(d)) cost(k, d) += sector_given_state(k, j);
            }
        }
    }
    std::vector<Complex> tap(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) tap[k] = channel.bob_amplitude(alphabet.state(k));

    Rng rng(seed);
    FrequencyEstimate est;
    std::vector<double> logp(static_cast<std::size_t>(n));
    Eigen::VectorXd posterior(n);
    for (std::int64_t i = 0; i < positions; ++i) {
        const int sent = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        const Complex c = sample_heterodyne(sent, channel, alphabet, rng);
        const double re = rng.normal();
        const double im = rng.normal();
        const Complex y = tap[sent] + std::sqrt(0.5) * Complex(re, im);

        double top = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < n; ++k) {
            logp[k] = -std::norm(y - tap[k]);
            top = std::max(top, logp[k]);
        }
        for (int k = 0; k < n; ++k) posterior[k] = std::exp(logp[k] - top);
        const Eigen::VectorXd expected = cost.transpose() * posterior;
        Eigen::Index declared = 0;
        expected.minCoeff(&declared);

        ++est.trials;
        if (eliminated_set(c, alphabet).contains(static_cast<int>(declared))) ++est.events;
    }
    return est;
}

}  // namespace cvqds
