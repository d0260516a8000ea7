#pragma once

// Monte Carlo runs of the three-party signature protocol: distribution,
// symmetrization, verification, and the honest, repudiating and forging
// scenarios.

#include <array>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "cvqds/channel_attacks.hpp"
#include "cvqds/rng.hpp"
#include "cvqds/security_bounds.hpp"

namespace cvqds {

enum class Recipient { kBob, kCharlie };

Recipient other(Recipient r) noexcept;

/// Alice's classical string for one message bit and one recipient.
struct PrivateKey {
    int message = 0;
    Recipient recipient = Recipient::kBob;
    std::vector<int> phases;
};

/// One recipient's eliminated sets, position by position.
using EliminatedList = std::vector<StateSet>;

struct EliminatedEntry {
    int position = 0;
    StateSet eliminated;
};

/// A recipient's signature after symmetrization: the half of his own list he
/// kept, and the half the other recipient forwarded to him.
struct EliminatedSignature {
    Recipient owner = Recipient::kBob;
    std::vector<EliminatedEntry> direct_half;
    std::vector<EliminatedEntry> swapped_half;
};

/// The triplet Alice sends with a signed message.
struct SignatureDeclaration {
    int message = 0;
    std::vector<int> phi_b;
    std::vector<int> phi_c;

    const std::vector<int>& key_for(Recipient r) const { return r == Recipient::kBob ? phi_b : phi_c; }
};

struct HalfCounts {
    int direct = 0;
    int swapped = 0;
};

struct Verification {
    HalfCounts counts;
    bool accepted = false;
};

struct ProtocolOutcome {
    HalfCounts bob_mismatches;
    HalfCounts charlie_mismatches;
    bool bob_accepts = false;
    bool charlie_accepts = false;
};

struct SimParams {
    Channel channel;
    Alphabet alphabet;
    /// Signature length L, even.
    std::int64_t length = 0;
    Thresholds thresholds;
};

/// Heterodyne outcome at Charlie's (or Bob's) receiver: the channel's outcome
/// mean for state `sent` plus Gaussian noise of variance
/// (1 + (1-T) n_bar) / 2 per quadrature.
Complex sample_heterodyne(int sent, const Channel& channel, const Alphabet& alphabet, Rng& rng);

/// Keys and raw eliminated lists for one message bit.
struct MessageDistribution {
    PrivateKey key_b;
    PrivateKey key_c;
    EliminatedList bob;
    EliminatedList charlie;
};

/// Steps 1-3 for one message bit.
MessageDistribution distribute_message(const SimParams& params, int message, Rng& rng);

/// Steps 1-3 for both message bits, index = message.
std::array<MessageDistribution, 2> run_distribution(const SimParams& params, Rng& rng);

/// Step 4: each recipient forwards a uniformly random L/2 positions of his
/// list to the other over a secret channel. Returns (Bob's, Charlie's).
std::pair<EliminatedSignature, EliminatedSignature> symmetrize(const EliminatedList& bob,
                                                               const EliminatedList& charlie,
                                                               Rng& rng);

/// Counts declared indices that fall in the eliminated sets. The direct half
/// is checked against the owner's key, the swapped half against the other
/// recipient's. Accepts iff each half has count < s * (L/2). Throws
/// MalformedDeclaration on length or index mismatches.
Verification verify(const SignatureDeclaration& declaration, const EliminatedSignature& signature,
                    double s, int alphabet_size);

/// Declaration an honest Alice sends for `message`.
SignatureDeclaration honest_declaration(const MessageDistribution& dist);

/// Steps 5-7 for a given declaration: Bob checks with s_B, Charlie with s_C.
ProtocolOutcome run_verification(const SignatureDeclaration& declaration,
                                 const std::pair<EliminatedSignature, EliminatedSignature>& sigs,
                                 const SimParams& params);

/// Event count over independent trials.
struct FrequencyEstimate {
    std::int64_t trials = 0;
    std::int64_t events = 0;

    double frequency() const;
    /// sqrt(f (1 - f) / n).
    double standard_error() const;
    FrequencyEstimate& operator+=(const FrequencyEstimate& other);
};

/// Allowed excess of an empirical frequency over a bound b at n trials:
/// 3 sqrt(b' (1 - b') / n) with b' = b clamped to [0, 1].
double statistical_slack(double bound, std::int64_t trials);

/// Trials [first, first + count) of an honest campaign; trial i draws from
/// Rng::stream(seed, i). Event: Bob or Charlie rejects.
FrequencyEstimate simulate_honest(const SimParams& params, std::int64_t first, std::int64_t count,
                                  std::uint64_t seed);
FrequencyEstimate simulate_honest(const SimParams& params, std::int64_t trials, std::uint64_t seed);

/// What Alice can see when cheating: her own keys, never the forwarding.
struct AliceView {
    int message = 0;
    const PrivateKey* key_b = nullptr;
    const PrivateKey* key_c = nullptr;
    const Alphabet* alphabet = nullptr;
};

using RepudiationStrategy = std::function<SignatureDeclaration(const AliceView&, Rng&)>;

/// Declares the antipodal state (k + N/2) on round(f L) uniformly chosen
/// positions of both keys, the true state elsewhere.
RepudiationStrategy antipodal_flip(double flip_fraction);

/// Mismatch rate the antipodal flip induces: (1 - f) p_err + f (1 - p_err).
double antipodal_flip_rate(double flip_fraction, double p_err);

/// Flip fraction inducing `rate`. Requires p_err < 1/2.
double flip_fraction_for_rate(double rate, double p_err);

/// Event: Bob accepts and Charlie rejects.
FrequencyEstimate simulate_repudiation(const SimParams& params, const RepudiationStrategy& strategy,
                                       std::int64_t trials, std::uint64_t seed);
FrequencyEstimate simulate_repudiation(const SimParams& params, double flip_fraction,
                                       std::int64_t trials, std::uint64_t seed);

/// Bob heterodynes his tap on the Alice-Charlie line, forms the posterior
/// over Alice's state and over Charlie's sector, and declares the index with
/// the smallest expected mismatch. Event: Charlie's eliminated set contains
/// the declared index. Requires the beamsplitter attack.
FrequencyEstimate simulate_forger_ml(const Channel& channel, const Alphabet& alphabet,
                                     std::int64_t positions, std::uint64_t seed);

}  // namespace cvqds
