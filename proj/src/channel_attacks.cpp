#include "cvqds/channel_attacks.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "cvqds/error.hpp"
#include "gauss_legendre.hpp"

namespace cvqds {

namespace {

constexpr double kPi = std::numbers::pi;

void require_transmission(double t) {
    if (!(t > 0.0 && t <= 1.0)) throw InvalidArgument("transmission T must lie in (0, 1]");
}

// Density of arg(c) for c with mean `mu` and variance `var` per quadrature.
double angular_density(double theta, Complex mu, double var) {
    const double a = std::abs(mu) / std::sqrt(2.0 * var);
    if (a == 0.0) return 1.0 / (2.0 * kPi);
    const double phi = theta - std::arg(mu);
    const double t = a * std::cos(phi);
    const double s = a * std::sin(phi);
    return (std::exp(-a * a) + std::sqrt(kPi) * t * std::exp(-s * s) * std::erfc(-t)) / (2.0 * kPi);
}

}  // namespace

double outcome_scale(OutcomeScaling scaling) {
    return scaling == OutcomeScaling::kPaper ? std::numbers::sqrt2 / 2.0 : 1.0;
}

// ---------------------------------------------------------------- Alphabet

Alphabet::Alphabet(int size, double amplitude) : size_(size), amplitude_(amplitude) {
    if (size < 2 || size > 64 || size % 2 != 0) {
        throw InvalidArgument("alphabet size must be even and between 2 and 64");
    }
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
        throw InvalidArgument("alphabet amplitude must be finite and nonnegative");
    }
}

double Alphabet::angle(int k) const { return 2.0 * kPi * k / size_; }

Complex Alphabet::state(int k) const {
    if (k < 0 || k >= size_) throw InvalidArgument("alphabet index out of range");
    // Exact values on the axes so that boundary ties stay ties.
    const int quarter = 4 * k;
    if (quarter % size_ == 0) {
        switch ((quarter / size_) % 4) {
            case 0: return {amplitude_, 0.0};
            case 1: return {0.0, amplitude_};
            case 2: return {-amplitude_, 0.0};
            default: return {0.0, -amplitude_};
        }
    }
    return std::polar(amplitude_, angle(k));
}

std::vector<Complex> Alphabet::states() const {
    std::vector<Complex> out(size_);
    for (int k = 0; k < size_; ++k) out[k] = state(k);
    return out;
}

// ---------------------------------------------------------------- Channel

Channel::Channel(double t, double xi, Attack attack, OutcomeScaling scaling)
    : t_(t), xi_(xi), attack_(attack), scaling_(scaling), n_bar_(0.0) {
    require_transmission(t);
    if (!(xi >= 0.0) || !std::isfinite(xi)) throw InvalidArgument("excess noise must be >= 0");
    if (attack == Attack::kBeamsplitter) {
        if (xi != 0.0) throw InvalidArgument("beamsplitter attack requires xi = 0");
    } else {
        if (t >= 1.0) throw InvalidArgument("entangling cloner needs T < 1 (n_bar undefined at T = 1)");
        if (xi <= 0.0) throw InvalidArgument("entangling cloner needs xi > 0");
        n_bar_ = 2.0 * xi / (1.0 - t);
    }
}

Channel Channel::beamsplitter(double transmission, OutcomeScaling scaling) {
    return Channel(transmission, 0.0, Attack::kBeamsplitter, scaling);
}

Channel Channel::entangling_cloner(double transmission, double excess_noise, OutcomeScaling scaling) {
    return Channel(transmission, excess_noise, Attack::kEntanglingCloner, scaling);
}

Channel Channel::from_excess_noise(double transmission, double excess_noise, OutcomeScaling scaling) {
    if (excess_noise == 0.0) return beamsplitter(transmission, scaling);
    return entangling_cloner(transmission, excess_noise, scaling);
}

Complex Channel::charlie_mean(Complex a) const {
    return outcome_scale(scaling_) * std::sqrt(t_) * a;
}

Complex Channel::bob_amplitude(Complex a) const { return std::sqrt(1.0 - t_) * a; }

// ---------------------------------------------------------------- StateSet

int StateSet::size() const noexcept { return std::popcount(mask_); }

std::vector<int> StateSet::indices() const {
    std::vector<int> out;
    for (int k = 0; k < 64; ++k) {
        if (contains(k)) out.push_back(k);
    }
    return out;
}

// ---------------------------------------------------------------- elimination

namespace {

// Picks the `count` lowest scores; scores within `tie` of each other are
// ordered by index.
StateSet lowest_scores(const std::vector<double>& score, int count, double tie) {
    const int n = static_cast<int>(score.size());
    StateSet chosen;
    for (int pick = 0; pick < count; ++pick) {
        int best = -1;
        for (int k = 0; k < n; ++k) {
            if (chosen.contains(k)) continue;
            if (best < 0 || score[k] < score[best] - tie) best = k;
        }
        chosen.insert(best);
    }
    return chosen;
}

}  // namespace

StateSet eliminated_set(Complex c, const Alphabet& alphabet) {
    if (!(alphabet.amplitude() > 0.0)) throw InvalidArgument("eliminated_set needs alpha > 0");
    const int n = alphabet.size();
    std::vector<double> score(n);
    for (int k = 0; k < n; ++k) {
        const Complex a = alphabet.state(k);
        score[k] = c.real() * a.real() + c.imag() * a.imag();
    }
    const double tie = 1e-12 * std::abs(c) * alphabet.amplitude();
    return lowest_scores(score, n / 2, tie);
}

double sector_start_angle(const Alphabet& alphabet, Sector sector) {
    const int n = alphabet.size();
    if (sector.index < 0 || sector.index >= n) throw InvalidArgument("sector index out of range");
    const double width = 2.0 * kPi / n;
    return std::fmod(kPi / 2.0, width) + width * sector.index;
}

StateSet sector_eliminated_set(const Alphabet& alphabet, Sector sector) {
    const int n = alphabet.size();
    const double centre = sector_start_angle(alphabet, sector) + kPi / n;
    std::vector<double> score(n);
    for (int k = 0; k < n; ++k) score[k] = std::cos(centre - alphabet.angle(k));
    return lowest_scores(score, n / 2, 1e-12);
}

Sector sector_of(Complex c, const Alphabet& alphabet) {
    const StateSet e = eliminated_set(c, alphabet);
    for (int j = 0; j < alphabet.size(); ++j) {
        if (sector_eliminated_set(alphabet, Sector{j}) == e) return Sector{j};
    }
    throw NumericError("eliminated set does not correspond to any sector");
}

// ---------------------------------------------------------------- error rates

double p_err_pure(double transmission, const Alphabet& alphabet, OutcomeScaling scaling) {
    require_transmission(transmission);
    return 0.5 * std::erfc(outcome_scale(scaling) * std::sqrt(transmission) * alphabet.amplitude());
}

double p_err_thermal(double transmission, const Alphabet& alphabet, double n_bar,
                     OutcomeScaling scaling) {
    require_transmission(transmission);
    if (!(n_bar >= 0.0)) throw InvalidArgument("n_bar must be nonnegative");
    const double var = 1.0 + (1.0 - transmission) * n_bar;
    return 0.5 * std::erfc(outcome_scale(scaling) * std::sqrt(transmission / var) *
                           alphabet.amplitude());
}

double p_err(const Channel& channel, const Alphabet& alphabet) {
    if (channel.attack() == Attack::kBeamsplitter) {
        return p_err_pure(channel.transmission(), alphabet, channel.scaling());
    }
    return p_err_thermal(channel.transmission(), alphabet, channel.mean_thermal_photons(),
                         channel.scaling());
}

// ---------------------------------------------------------------- sectors

double sector_probability(int k, const Channel& channel, const Alphabet& alphabet, Sector sector) {
    const int n = alphabet.size();
    const Complex mu = channel.charlie_mean(alphabet.state(k));
    const double var = channel.quadrature_variance();
    if (mu == Complex{}) return 1.0 / n;

    const double start = sector_start_angle(alphabet, sector);
    if (n == 4) {
        // Quadrant [start, start + pi/2): rotate so it becomes the first quadrant.
        const Complex m = mu * std::conj(alphabet.with_amplitude(1.0).state(sector.index));
        const double s = std::sqrt(2.0 * var);
        return 0.25 * std::erfc(-m.real() / s) * std::erfc(-m.imag() / s);
    }

    // Panels of at most pi/8 keep the Kronrod error estimate near rounding level.
    const double width = 2.0 * kPi / n;
    const int panels = static_cast<int>(std::ceil(width / (kPi / 8.0) - 1e-9));
    const double h = width / panels;
    double p = 0.0;
    double error = 0.0;
    for (int i = 0; i < panels; ++i) {
        double e = 0.0;
        p += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double theta) { return angular_density(theta, mu, var); }, start + i * h,
            start + (i + 1) * h, 10, 1e-14, &e);
        error += e;
    }
    if (error > 1e-12) {
        std::ostringstream os;
        os << "sector quadrature reached error " << error << " (tolerance 1e-12), estimate " << p;
        throw NumericError(os.str());
    }
    return p;
}

Eigen::MatrixXd sector_probability_table(const Channel& channel, const Alphabet& alphabet) {
    const int n = alphabet.size();
    Eigen::MatrixXd table(n, n);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) table(k, j) = sector_probability(k, channel, alphabet, Sector{j});
    }
    return table;
}

// ---------------------------------------------------------------- beamsplitter

double holevo_beamsplitter(const Channel& channel, const Alphabet& alphabet) {
    if (channel.attack() != Attack::kBeamsplitter) {
        throw InvalidArgument("holevo_beamsplitter needs a pure-loss channel");
    }
    // Bob's states all coincide: nothing to learn, and no rounding residue.
    if (channel.transmission() == 1.0 || alphabet.amplitude() == 0.0) return 0.0;
    const int n = alphabet.size();
    std::vector<Complex> bob(n);
    for (int k = 0; k < n; ++k) bob[k] = channel.bob_amplitude(alphabet.state(k));

    const double prior = mixture_entropy(CoherentMixture::uniform(bob));
    const Eigen::MatrixXd table = sector_probability_table(channel, alphabet);

    double conditional = 0.0;
    for (int j = 0; j < n; ++j) {
        const double pj = table.col(j).sum() / n;
        if (pj <= 0.0) continue;
        std::vector<double> w(n);
        for (int k = 0; k < n; ++k) w[k] = table(k, j) / (n * pj);
        // Renormalize away the last-bit rounding of the column sum.
        double total = 0.0;
        for (double x : w) total += x;
        for (double& x : w) x /= total;
        conditional += pj * mixture_entropy(CoherentMixture(bob, w));
    }
    return std::max(prior - conditional, 0.0);
}

// ---------------------------------------------------------------- cloner

int suggested_cloner_dim(const Channel& channel, const Alphabet& alphabet) {
    const double beta = std::sqrt(1.0 - channel.transmission()) * alphabet.amplitude();
    // Poisson tail of the reflected coherent amplitude below 1e-14.
    int base = 4;
    while (beta > 0.0 && boost::math::gamma_p(static_cast<double>(base), beta * beta) > 1e-14) ++base;
    // B1' also receives T * n_bar thermal photons; pad for their geometric tail.
    const double thermal = channel.transmission() * channel.mean_thermal_photons();
    int pad = 0;
    if (thermal > 0.0) {
        const double ratio = thermal / (1.0 + thermal);
        pad = static_cast<int>(std::ceil(std::log(1e-12) / std::log(ratio)));
    }
    return base + pad;
}

double holevo_cloner(const Channel& channel, const Alphabet& alphabet, const QuadratureSpec& grid,
                     int dim) {
    if (channel.attack() != Attack::kEntanglingCloner) {
        throw InvalidArgument("holevo_cloner needs a thermal-loss (entangling cloner) channel");
    }
    if (dim < 1) throw InvalidArgument("holevo_cloner: dim must be >= 1");
    if (grid.radial_nodes < 1 || grid.angular_nodes < 1 || !(grid.radius_margin > 0.0)) {
        throw InvalidArgument("holevo_cloner: invalid quadrature grid");
    }

    const int n = alphabet.size();
    const double t = channel.transmission();
    const auto tmsv = TmsvParams::from_mean_photons(channel.mean_thermal_photons());
    const int m_max = tmsv.cutoff();
    const int cols = m_max + 1;
    const int big = dim * cols;

    // coef(j, m) for j <= m, zero above the diagonal's complement.
    Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(cols, cols);
    for (int m = 0; m <= m_max; ++m) {
        for (int j = 0; j <= m; ++j) coef(j, m) = cloner_branch_coefficient(m, j, t, tmsv);
    }

    double max_mean = 0.0;
    for (int k = 0; k < n; ++k) max_mean = std::max(max_mean, std::abs(channel.charlie_mean(alphabet.state(k))));
    const double radius = max_mean + grid.radius_margin + std::sqrt(static_cast<double>(m_max));
    const auto radial = detail::gauss_legendre(grid.radial_nodes, 0.0, radius);
    const double width = 2.0 * kPi / n;

    std::vector<Eigen::MatrixXcd> displaced(n);
    for (int k = 0; k < n; ++k) {
        displaced[k] = displaced_number_states(channel.bob_amplitude(alphabet.state(k)), dim, cols);
    }

    // Sector moments per input state: moments[k][s](p, q) =
    // (1/pi) int_sector exp(-|d|^2) conj(d)^p d^q with d = c - gamma_k.
    std::vector<std::vector<Eigen::MatrixXcd>> moments(
        n, std::vector<Eigen::MatrixXcd>(n, Eigen::MatrixXcd::Zero(cols, cols)));
    std::vector<Complex> dpow(cols);
    for (int s = 0; s < n; ++s) {
        const double start = sector_start_angle(alphabet, Sector{s});
        const auto angular = detail::gauss_legendre(grid.angular_nodes, start, start + width);
        for (int k = 0; k < n; ++k) {
            const Complex gamma = channel.charlie_mean(alphabet.state(k));
            Eigen::MatrixXcd& mom = moments[k][s];
            for (int a = 0; a < grid.radial_nodes; ++a) {
                const double r = radial.nodes[a];
                for (int b = 0; b < grid.angular_nodes; ++b) {
                    const Complex d = std::polar(r, angular.nodes[b]) - gamma;
                    const double w = radial.weights[a] * angular.weights[b] * r *
                                     std::exp(-std::norm(d)) / kPi;
                    if (w == 0.0) continue;
                    dpow[0] = 1.0;
                    for (int p = 1; p < cols; ++p) dpow[p] = dpow[p - 1] * d;
                    for (int p = 0; p < cols; ++p) {
                        const Complex left = w * std::conj(dpow[p]);
                        for (int q = 0; q < cols; ++q) mom(p, q) += left * dpow[q];
                    }
                }
            }
        }
    }

    // Bob's state for a given moment matrix, indexed (m, n) -> m * dim + n:
    // block (m, m2) = W P W^dag with P(j, j2) = coef(j, m) coef(j2, m2) mom(m - j, m2 - j2).
    const auto assemble = [&](int k, const Eigen::MatrixXcd& mom, Eigen::MatrixXcd& rho) {
        const Eigen::MatrixXcd& w = displaced[k];
        for (int m = 0; m < cols; ++m) {
            for (int m2 = m; m2 < cols; ++m2) {
                Eigen::MatrixXcd p(m + 1, m2 + 1);
                for (int j = 0; j <= m; ++j) {
                    for (int j2 = 0; j2 <= m2; ++j2) p(j, j2) = coef(j, m) * coef(j2, m2) * mom(m - j, m2 - j2);
                }
                const Eigen::MatrixXcd block =
                    w.leftCols(m + 1) * p * w.leftCols(m2 + 1).adjoint() / static_cast<double>(n);
                rho.block(m * dim, m2 * dim, dim, dim) += block;
                if (m2 != m) rho.block(m2 * dim, m * dim, dim, dim) += block.adjoint();
            }
        }
    };

    Eigen::MatrixXcd prior = Eigen::MatrixXcd::Zero(big, big);
    Eigen::MatrixXcd sector0 = Eigen::MatrixXcd::Zero(big, big);
    for (int k = 0; k < n; ++k) {
        Eigen::MatrixXcd all = Eigen::MatrixXcd::Zero(cols, cols);
        for (int s = 0; s < n; ++s) all += moments[k][s];
        assemble(k, all, prior);
        assemble(k, moments[k][0], sector0);
    }
    const double total = prior.trace().real();
    const double mass0 = sector0.trace().real();
    if (1.0 - total > 1e-9) {
        std::ostringstream os;
        os << "cloner state loses " << 1.0 - total << " of its trace at dim " << dim;
        throw TruncationError(os.str(), dim + std::max(8, dim / 2));
    }

    const double s_prior = von_neumann_entropy(DensityMatrix(prior / total));
    // Sectors are rotations of one another (phase shifts on B1' and B2), so
    // their entropies coincide; sector 0 stands in for all of them.
    const double s_sector = von_neumann_entropy(DensityMatrix(sector0 / mass0));
    return std::max(s_prior - s_sector, 0.0);
}

ConvergedHolevo holevo_cloner_converged(const Channel& channel, const Alphabet& alphabet,
                                        double tolerance, int max_rounds) {
    QuadratureSpec grid;
    int dim = suggested_cloner_dim(channel, alphabet);
    double chi = holevo_cloner(channel, alphabet, grid, dim);
    double change = 0.0;
    for (int round = 0; round < max_rounds; ++round) {
        const QuadratureSpec finer = grid.doubled();
        const int bigger = dim + 4;
        const double next = holevo_cloner(channel, alphabet, finer, bigger);
        change = std::abs(next - chi);
        grid = finer;
        dim = bigger;
        chi = next;
        if (change < tolerance) return {chi, grid, dim, change};
    }
    std::ostringstream os;
    os << "cloner Holevo information did not converge: last change " << change;
    throw NumericError(os.str());
}

double holevo(const Channel& channel, const Alphabet& alphabet) {
    if (channel.attack() == Attack::kBeamsplitter) return holevo_beamsplitter(channel, alphabet);
    return holevo_cloner_converged(channel, alphabet).chi;
}

}  // namespace cvqds
