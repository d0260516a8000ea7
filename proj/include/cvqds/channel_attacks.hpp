#pragma once

// Honest mismatch rates and the eavesdropper's Holevo information for the
// beamsplitter (pure-loss) and entangling-cloner (thermal-loss) attacks on a
// phase-encoded alphabet of N coherent states.

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cvqds/quantum_core.hpp"

namespace cvqds {

/// How the alphabet amplitude enters Charlie's heterodyne statistics.
///
/// kPaper: Charlie's outcomes behave as if the received amplitude were
/// sqrt(T) * alpha / sqrt(2), which is what makes the honest error rate equal
/// erfc(sqrt(T/2) alpha) / 2. This is the default and reproduces the
/// published signature lengths.
///
/// kPhysical: Charlie's outcomes are centred on sqrt(T) * alpha, the same
/// amplitude convention as Bob's reflected states. Self-consistent, but the
/// honest error rate becomes erfc(sqrt(T) alpha) / 2.
enum class OutcomeScaling { kPaper, kPhysical };

/// Multiplier applied to sqrt(T) * alpha_k to get the mean of Charlie's outcome.
double outcome_scale(OutcomeScaling scaling);

/// N coherent states alpha * exp(2 pi i k / N), k = 0..N-1.
class Alphabet {
public:
    /// N must be even, 2 <= N <= 64; alpha must be finite and >= 0.
    Alphabet(int size, double amplitude);

    int size() const noexcept { return size_; }
    double amplitude() const noexcept { return amplitude_; }
    double angle(int k) const;
    Complex state(int k) const;
    std::vector<Complex> states() const;

    /// Same constellation with a different amplitude.
    Alphabet with_amplitude(double amplitude) const { return Alphabet(size_, amplitude); }

private:
    int size_;
    double amplitude_;
};

enum class Attack { kBeamsplitter, kEntanglingCloner };

/// Transmission T, excess noise xi at the receiver, and the attack class.
class Channel {
public:
    /// Pure-loss channel, xi = 0.
    static Channel beamsplitter(double transmission,
                                OutcomeScaling scaling = OutcomeScaling::kPaper);

    /// Thermal-loss channel with n_bar = 2 xi / (1 - T). Requires T < 1 and xi > 0.
    static Channel entangling_cloner(double transmission, double excess_noise,
                                     OutcomeScaling scaling = OutcomeScaling::kPaper);

    /// Picks the attack from xi: beamsplitter for xi == 0, cloner otherwise.
    static Channel from_excess_noise(double transmission, double excess_noise,
                                     OutcomeScaling scaling = OutcomeScaling::kPaper);

    double transmission() const noexcept { return t_; }
    double excess_noise() const noexcept { return xi_; }
    Attack attack() const noexcept { return attack_; }
    OutcomeScaling scaling() const noexcept { return scaling_; }

    /// Thermal photons injected by the cloner; 0 for the beamsplitter.
    double mean_thermal_photons() const noexcept { return n_bar_; }

    /// Charlie's outcome variance per quadrature, (1 + (1-T) n_bar) / 2.
    double quadrature_variance() const noexcept { return 0.5 * (1.0 + (1.0 - t_) * n_bar_); }

    /// Mean of Charlie's heterodyne outcome when state `a` is sent.
    Complex charlie_mean(Complex a) const;
    /// Amplitude of the coherent state reaching Bob's reflected port.
    Complex bob_amplitude(Complex a) const;

private:
    Channel(double t, double xi, Attack attack, OutcomeScaling scaling);

    double t_;
    double xi_;
    Attack attack_;
    OutcomeScaling scaling_;
    double n_bar_;
};

/// One of the N angular regions of width 2 pi / N that partition the outcome
/// plane; every outcome inside a sector eliminates the same N/2 states.
struct Sector {
    int index = 0;
    friend bool operator==(Sector, Sector) = default;
};

/// Subset of alphabet indices, stored as a bit mask.
class StateSet {
public:
    StateSet() = default;
    explicit StateSet(std::uint64_t mask) : mask_(mask) {}

    bool contains(int k) const noexcept { return (mask_ >> k) & 1U; }
    void insert(int k) noexcept { mask_ |= std::uint64_t{1} << k; }
    int size() const noexcept;
    std::uint64_t mask() const noexcept { return mask_; }
    std::vector<int> indices() const;

    friend bool operator==(StateSet, StateSet) = default;

private:
    std::uint64_t mask_ = 0;
};

/// The N/2 states least compatible with outcome `c`: smallest
/// Re(c * conj(alpha_k)), ties (within a relative 1e-12) going to the smaller
/// index. Requires alpha > 0.
StateSet eliminated_set(Complex c, const Alphabet& alphabet);

/// Lower edge angle of a sector; the sector spans [start, start + 2 pi / N).
double sector_start_angle(const Alphabet& alphabet, Sector sector);

/// States eliminated by any outcome in the interior of `sector`.
StateSet sector_eliminated_set(const Alphabet& alphabet, Sector sector);

/// Sector whose eliminated set equals eliminated_set(c). Boundary outcomes
/// follow the tie-break of eliminated_set.
Sector sector_of(Complex c, const Alphabet& alphabet);

/// Honest mismatch probability on a pure-loss channel: P(Re c < 0 | alpha).
double p_err_pure(double transmission, const Alphabet& alphabet,
                  OutcomeScaling scaling = OutcomeScaling::kPaper);

/// Honest mismatch probability with n_bar thermal photons injected.
double p_err_thermal(double transmission, const Alphabet& alphabet, double n_bar,
                     OutcomeScaling scaling = OutcomeScaling::kPaper);

/// Dispatches on the channel's attack class.
double p_err(const Channel& channel, const Alphabet& alphabet);

/// P(Charlie's outcome lies in `sector` | state k sent).
///
/// N = 4 uses the factorized erfc product per quadrant; other N integrate the
/// closed-form angular marginal of the Gaussian outcome density with adaptive
/// Gauss-Kronrod quadrature. Throws NumericError if the error estimate
/// exceeds 1e-12.
double sector_probability(int k, const Channel& channel, const Alphabet& alphabet, Sector sector);

/// table(k, j) = sector_probability(k, channel, alphabet, Sector{j}).
Eigen::MatrixXd sector_probability_table(const Channel& channel, const Alphabet& alphabet);

/// chi = S(rho_B) - sum_j p_j S(rho_B^j) for the beamsplitter attack, with
/// all entropies from Gram matrices. Requires the beamsplitter attack.
double holevo_beamsplitter(const Channel& channel, const Alphabet& alphabet);

/// Polar Gauss-Legendre grid used to integrate over a sector.
struct QuadratureSpec {
    int radial_nodes = 48;
    int angular_nodes = 24;
    /// Radius beyond the largest outcome mean, in shot-noise units.
    double radius_margin = 10.0;

    QuadratureSpec doubled() const { return {2 * radial_nodes, 2 * angular_nodes, radius_margin}; }
};

/// Holevo information of Bob's two modes (B1', B2) about Charlie's sector
/// under the entangling-cloner attack, in a Fock space truncated at `dim`
/// photons for B1'. Throws TruncationError when the truncated states lose
/// more than 1e-9 of their norm.
double holevo_cloner(const Channel& channel, const Alphabet& alphabet,
                     const QuadratureSpec& grid, int dim);

/// B1' truncation the cloner calculation starts from.
int suggested_cloner_dim(const Channel& channel, const Alphabet& alphabet);

struct ConvergedHolevo {
    double chi = 0.0;
    QuadratureSpec grid;
    int dim = 0;
    /// |chi(grid, dim) - chi(previous grid, previous dim)| at acceptance.
    double last_change = 0.0;
};

/// Repeats holevo_cloner, doubling the grid and growing dim, until chi
/// changes by less than `tolerance`. Throws NumericError after `max_rounds`.
ConvergedHolevo holevo_cloner_converged(const Channel& channel, const Alphabet& alphabet,
                                        double tolerance = 1e-5, int max_rounds = 5);

/// Beamsplitter or converged cloner, according to the channel.
double holevo(const Channel& channel, const Alphabet& alphabet);

}  // namespace cvqds
