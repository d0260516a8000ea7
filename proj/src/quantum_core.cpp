#include "cvqds/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "cvqds/error.hpp"

namespace cvqds {

namespace {

void require_finite(Complex a, const char* what) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
        throw InvalidArgument(std::string(what) + ": amplitude must be finite");
    }
}

}  // namespace

int suggested_fock_dim(double mu) {
    mu = std::abs(mu);
    return static_cast<int>(std::ceil(mu * mu + 10.0 * mu + 20.0));
}

Complex coherent_overlap(Complex a, Complex b) {
    return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

// ---------------------------------------------------------------- mixtures

CoherentMixture::CoherentMixture(std::vector<Complex> amplitudes, std::vector<double> weights)
    : amplitudes_(std::move(amplitudes)), weights_(std::move(weights)) {
    if (amplitudes_.empty()) throw InvalidArgument("mixture needs at least one component");
    if (amplitudes_.size() != weights_.size()) {
        throw InvalidArgument("mixture amplitude and weight lists differ in length");
    }
    for (auto a : amplitudes_) require_finite(a, "mixture");
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0)) throw InvalidArgument("mixture weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "mixture weights sum to " << total << ", expected 1";
        throw InvalidArgument(os.str());
    }
}

CoherentMixture CoherentMixture::uniform(std::vector<Complex> amplitudes) {
    const auto k = amplitudes.size();
    if (k == 0) throw InvalidArgument("mixture needs at least one component");
    std::vector<double> w(k, 1.0 / static_cast<double>(k));
    // Absorb the rounding of k * (1/k) into the last weight.
    w.back() = 1.0 - std::accumulate(w.begin(), w.end() - 1, 0.0);
    return CoherentMixture(std::move(amplitudes), std::move(w));
}

Eigen::MatrixXcd CoherentMixture::gram() const {
    const auto k = static_cast<Eigen::Index>(size());
    Eigen::MatrixXcd g(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = i; j < k; ++j) {
            const Complex v = std::sqrt(weights_[i] * weights_[j]) *
                              coherent_overlap(amplitudes_[i], amplitudes_[j]);
            g(i, j) = v;
            g(j, i) = std::conj(v);
        }
    }
    return g;
}

// ---------------------------------------------------------------- Fock vectors

FockVector::FockVector(Eigen::VectorXcd coefficients) : coefficients_(std::move(coefficients)) {
    if (coefficients_.size() == 0) throw InvalidArgument("Fock vector needs dim >= 1");
    const double n2 = coefficients_.squaredNorm();
    if (n2 > 1.0 + 1e-9) throw InvalidState("Fock vector has squared norm above 1");
    deficit_ = 1.0 - n2;
}

FockVector::FockVector(Eigen::VectorXcd coefficients, double deficit)
    : coefficients_(std::move(coefficients)), deficit_(deficit) {}

FockVector coherent_fock_vector(Complex a, int dim, double tolerance) {
    require_finite(a, "coherent_fock_vector");
    if (dim < 1) throw InvalidArgument("coherent_fock_vector: dim must be >= 1");

    Eigen::VectorXcd v(dim);
    v(0) = std::exp(-0.5 * std::norm(a));
    for (int n = 1; n < dim; ++n) v(n) = v(n - 1) * a / std::sqrt(static_cast<double>(n));

    const double mean = std::norm(a);
    const double deficit = mean == 0.0 ? 0.0 : boost::math::gamma_p(static_cast<double>(dim), mean);
    if (deficit > tolerance) {
        int need = std::max(suggested_fock_dim(std::abs(a)), dim + 1);
        while (boost::math::gamma_p(static_cast<double>(need), mean) > tolerance) need *= 2;
        std::ostringstream os;
        os << "coherent state |" << a << "> loses " << deficit << " norm at dim " << dim
           << "; need dim >= " << need;
        throw TruncationError(os.str(), need);
    }
    return FockVector(std::move(v), deficit);
}

Eigen::MatrixXcd displaced_number_states(Complex beta, int dim, int cols) {
    require_finite(beta, "displaced_number_states");
    if (dim < 1 || cols < 1) throw InvalidArgument("displaced_number_states: empty shape");

    // D(beta)|j> = (a^dag - conj(beta))^j / sqrt(j!) |beta>. Work in a padded
    // space so the raising operator never reads past the truncation edge in
    // the rows we keep.
    const int ext = dim + cols + suggested_fock_dim(std::abs(beta));
    Eigen::VectorXcd psi(ext);
    psi(0) = std::exp(-0.5 * std::norm(beta));
    for (int n = 1; n < ext; ++n) psi(n) = psi(n - 1) * beta / std::sqrt(static_cast<double>(n));

    Eigen::MatrixXcd out(dim, cols);
    out.col(0) = psi.head(dim);
    Eigen::VectorXcd next(ext);
    for (int j = 1; j < cols; ++j) {
        next(0) = -std::conj(beta) * psi(0);
        for (int n = 1; n < ext; ++n) {
            next(n) = std::sqrt(static_cast<double>(n)) * psi(n - 1) - std::conj(beta) * psi(n);
        }
        psi = next / std::sqrt(static_cast<double>(j));
        out.col(j) = psi.head(dim);
    }
    return out;
}

// ---------------------------------------------------------------- density matrices

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
        throw InvalidState("density matrix must be square and nonempty");
    }
    const double asym = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-10) {
        std::ostringstream os;
        os << "density matrix is not Hermitian (max |rho - rho^dag| = " << asym << ")";
        throw InvalidState(os.str());
    }
    // Remove the antihermitian rounding residue.
    entries_ = 0.5 * (entries_ + entries_.adjoint()).eval();
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& v) {
    const double n2 = v.squaredNorm();
    if (!(n2 > 0.0)) throw InvalidState("cannot form a projector from a zero vector");
    return DensityMatrix(v * v.adjoint() / n2);
}

DensityMatrix DensityMatrix::diagonal(std::span<const double> populations) {
    Eigen::VectorXcd d(static_cast<Eigen::Index>(populations.size()));
    for (std::size_t i = 0; i < populations.size(); ++i) d(static_cast<Eigen::Index>(i)) = populations[i];
    return DensityMatrix(d.asDiagonal().toDenseMatrix());
}

DensityMatrix DensityMatrix::normalized() const {
    const double t = trace();
    if (!(t > 0.0)) throw InvalidState("density matrix has nonpositive trace");
    return DensityMatrix(entries_ / t);
}

// ---------------------------------------------------------------- entropies

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericError("Hermitian eigensolver did not converge");
    }
    return solver.eigenvalues();
}

double entropy_of_spectrum(std::span<const double> eigenvalues) {
    double s = 0.0;
    for (double l : eigenvalues) {
        if (l < -kNegativeEigenvalueTolerance) {
            std::ostringstream os;
            os << "negative eigenvalue " << l << " in density operator";
            throw InvalidState(os.str());
        }
        if (l > kEigenvalueCutoff) s -= l * std::log2(l);
    }
    return std::max(s, 0.0);
}

double mixture_entropy(const CoherentMixture& mixture) {
    const Eigen::VectorXd ev = hermitian_eigenvalues(mixture.gram());
    return entropy_of_spectrum({ev.data(), static_cast<std::size_t>(ev.size())});
}

double von_neumann_entropy(const DensityMatrix& rho) {
    const double t = rho.trace();
    if (std::abs(t - 1.0) > 1e-8) {
        std::ostringstream os;
        os << "von_neumann_entropy needs unit trace, got " << t;
        throw InvalidState(os.str());
    }
    const Eigen::VectorXd ev = hermitian_eigenvalues(rho.entries());
    return entropy_of_spectrum({ev.data(), static_cast<std::size_t>(ev.size())});
}

// ---------------------------------------------------------------- TMSV

TmsvParams TmsvParams::from_mean_photons(double n_bar) {
    if (!(n_bar >= 0.0) || !std::isfinite(n_bar)) {
        throw InvalidArgument("TMSV mean photon number must be finite and nonnegative");
    }
    return TmsvParams(n_bar, std::asinh(std::sqrt(n_bar)));
}

double TmsvParams::coefficient(int m) const {
    if (m < 0) throw InvalidArgument("TMSV coefficient index must be nonnegative");
    if (m == 0) return 1.0 / std::cosh(r_);
    return std::pow(std::tanh(r_), m) / std::cosh(r_);
}

int TmsvParams::cutoff(double tail_tolerance) const {
    const double t2 = n_bar_ / (1.0 + n_bar_);  // tanh^2 r
    if (t2 == 0.0) return 0;
    int m = 0;
    double tail = t2;
    while (tail >= tail_tolerance) {
        tail *= t2;
        ++m;
    }
    return m;
}

// ---------------------------------------------------------------- cloner

double cloner_branch_coefficient(int m, int j, double transmission, const TmsvParams& tmsv) {
    if (j < 0 || j > m) throw InvalidArgument("cloner branch needs 0 <= j <= m");
    const int p = m - j;
    const double binom = boost::math::binomial_coefficient<double>(static_cast<unsigned>(m),
                                                                   static_cast<unsigned>(j));
    const double sign = (p % 2 == 0) ? 1.0 : -1.0;
    return sign * tmsv.coefficient(m) * std::sqrt(binom) *
           std::pow(transmission, 0.5 * j) * std::pow(1.0 - transmission, 0.5 * p) /
           std::sqrt(std::tgamma(p + 1.0));
}

TwoModeVector cloner_conditional_state(Complex alpha_k, double transmission,
                                       const TmsvParams& tmsv, Complex c, int dim,
                                       double charlie_scale, double tolerance) {
    require_finite(alpha_k, "cloner_conditional_state");
    require_finite(c, "cloner_conditional_state");
    if (!(transmission > 0.0 && transmission <= 1.0)) {
        throw InvalidArgument("cloner_conditional_state: T must lie in (0, 1]");
    }
    if (dim < 1) throw InvalidArgument("cloner_conditional_state: dim must be >= 1");

    const int m_max = tmsv.cutoff();
    const int cols = m_max + 1;
    const Complex gamma = charlie_scale * std::sqrt(transmission) * alpha_k;
    const Complex beta = std::sqrt(1.0 - transmission) * alpha_k;
    const Complex d = c - gamma;
    const Complex dc = std::conj(d);

    // u(j, m) before Bob's displacement.
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(cols, cols);
    const double envelope = std::exp(-0.5 * std::norm(d)) / std::sqrt(std::numbers::pi);
    for (int m = 0; m <= m_max; ++m) {
        for (int j = 0; j <= m; ++j) {
            u(j, m) = envelope * cloner_branch_coefficient(m, j, transmission, tmsv) *
                      std::pow(dc, m - j);
        }
    }
    const Eigen::MatrixXcd w = displaced_number_states(beta, dim, cols);
    const Eigen::MatrixXcd v = w * u;  // rows: B1' photon number, cols: B2 photon number

    TwoModeVector out;
    out.dim_b1 = dim;
    out.dim_b2 = cols;
    out.coefficients.resize(static_cast<Eigen::Index>(dim) * cols);
    for (int n = 0; n < dim; ++n) {
        for (int m = 0; m < cols; ++m) out.coefficients(n * cols + m) = v(n, m);
    }
    out.weight = out.coefficients.squaredNorm();

    const double var = 1.0 + (1.0 - transmission) * tmsv.n_bar();
    const double exact = std::exp(-std::norm(d) / var) / (std::numbers::pi * var);
    out.truncation_deficit = exact > 0.0 ? 1.0 - out.weight / exact : 0.0;
    if (out.truncation_deficit > tolerance) {
        std::ostringstream os;
        os << "cloner conditional state loses " << out.truncation_deficit
           << " of its norm at dim " << dim;
        throw TruncationError(os.str(), std::max(dim * 2, suggested_fock_dim(std::abs(beta)) + cols));
    }
    return out;
}

}  // namespace cvqds
