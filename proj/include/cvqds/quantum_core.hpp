#pragma once

// Coherent states, truncated Fock-space states and von Neumann entropies.
//
// Amplitudes are in shot-noise units: a coherent state |a> heterodyned
// directly gives outcomes distributed as (1/pi) exp(-|c - a|^2), i.e. each
// quadrature has variance 1/2.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cvqds {

using Complex = std::complex<double>;

/// Fock truncation that comfortably holds a displacement of magnitude `mu`:
/// ceil(mu^2 + 10 mu + 20).
int suggested_fock_dim(double mu);

/// <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b).
Complex coherent_overlap(Complex a, Complex b);

/// Finite mixture sum_k w_k |a_k><a_k| of coherent states.
class CoherentMixture {
public:
    /// Throws InvalidArgument unless the lists are equally long and nonempty,
    /// every amplitude is finite, and the weights are nonnegative and sum to 1
    /// within 1e-12.
    CoherentMixture(std::vector<Complex> amplitudes, std::vector<double> weights);

    /// Equal weights 1/K.
    static CoherentMixture uniform(std::vector<Complex> amplitudes);

    std::size_t size() const noexcept { return amplitudes_.size(); }
    const std::vector<Complex>& amplitudes() const noexcept { return amplitudes_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

    /// Weighted Gram matrix sqrt(w_j w_k) <a_j|a_k>; it has the same nonzero
    /// spectrum as the mixture's density operator.
    Eigen::MatrixXcd gram() const;

private:
    std::vector<Complex> amplitudes_;
    std::vector<double> weights_;
};

/// Single-mode state vector in the number basis |0>, ..., |dim-1>.
class FockVector {
public:
    explicit FockVector(Eigen::VectorXcd coefficients);

    int dim() const noexcept { return static_cast<int>(coefficients_.size()); }
    const Eigen::VectorXcd& coefficients() const noexcept { return coefficients_; }
    double squared_norm() const { return coefficients_.squaredNorm(); }

    /// Norm lost to truncation, set by the constructor that knows it exactly.
    double truncation_deficit() const noexcept { return deficit_; }

private:
    friend FockVector coherent_fock_vector(Complex a, int dim, double tolerance);
    FockVector(Eigen::VectorXcd coefficients, double deficit);

    Eigen::VectorXcd coefficients_;
    double deficit_ = 0.0;
};

/// e^{-|a|^2/2} a^n / sqrt(n!) for n < dim.
///
/// The deficit 1 - ||v||^2 is the Poisson(|a|^2) tail mass beyond dim-1 and is
/// evaluated with the regularized incomplete gamma function, so it stays
/// accurate far below machine epsilon relative to 1. Throws TruncationError
/// (carrying a suggested dimension) when it exceeds `tolerance`.
FockVector coherent_fock_vector(Complex a, int dim, double tolerance = 1e-12);

/// Columns D(beta)|j> for j = 0..cols-1, truncated to `dim` rows.
Eigen::MatrixXcd displaced_number_states(Complex beta, int dim, int cols);

/// Hermitian positive semidefinite operator on a finite-dimensional space.
class DensityMatrix {
public:
    /// Validates Hermiticity to 1e-10 (absolute, entrywise). Throws InvalidState.
    explicit DensityMatrix(Eigen::MatrixXcd entries);

    /// Projector |v><v| / <v|v>.
    static DensityMatrix pure(const Eigen::VectorXcd& v);

    /// Diagonal state with the given populations.
    static DensityMatrix diagonal(std::span<const double> populations);

    int dim() const noexcept { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXcd& entries() const noexcept { return entries_; }
    double trace() const { return entries_.trace().real(); }

    /// Copy rescaled to unit trace. Throws InvalidState for zero trace.
    DensityMatrix normalized() const;

private:
    Eigen::MatrixXcd entries_;
};

/// Eigenvalue threshold below which contributions to entropies are dropped.
inline constexpr double kEigenvalueCutoff = 1e-14;
/// Negative eigenvalues down to this value are rounding noise and clamped to 0.
inline constexpr double kNegativeEigenvalueTolerance = 1e-10;

/// -sum lambda log2 lambda over a spectrum, applying the cutoff and clamp
/// above. Throws InvalidState for eigenvalues below -1e-10.
double entropy_of_spectrum(std::span<const double> eigenvalues);

/// Eigenvalues of a Hermitian matrix, ascending. Throws NumericError if the
/// eigensolver fails.
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m);

/// von Neumann entropy in bits, via the weighted Gram matrix (exact, no
/// truncation).
double mixture_entropy(const CoherentMixture& mixture);

/// von Neumann entropy in bits. Requires unit trace within 1e-8.
double von_neumann_entropy(const DensityMatrix& rho);

/// Two-mode squeezed vacuum, parameterized by its mean photon number per mode.
class TmsvParams {
public:
    /// Throws InvalidArgument for negative or non-finite n_bar.
    static TmsvParams from_mean_photons(double n_bar);

    double n_bar() const noexcept { return n_bar_; }
    double squeezing() const noexcept { return r_; }

    /// G_m = tanh(r)^m / cosh(r); sum_m G_m^2 = 1.
    double coefficient(int m) const;

    /// Smallest M with sum_{m>M} G_m^2 = tanh(r)^{2(M+1)} < tail_tolerance.
    int cutoff(double tail_tolerance = 1e-12) const;

private:
    TmsvParams(double n_bar, double r) : n_bar_(n_bar), r_(r) {}

    double n_bar_;
    double r_;
};

/// Mode B1' x mode B2 vector, flattened as index n * dim_b2 + m.
struct TwoModeVector {
    int dim_b1 = 0;
    int dim_b2 = 0;
    Eigen::VectorXcd coefficients;
    /// Squared norm: the probability density of the heterodyne outcome.
    double weight = 0.0;
    /// 1 - weight / (exact outcome density).
    double truncation_deficit = 0.0;
};

/// Amplitude sqrt(C(m,j)) G_m T^{j/2} (-sqrt(1-T))^{m-j} / sqrt((m-j)!) of the
/// term |j>_{B1'} |m>_{B2} (c - gamma)^{*(m-j)} in <c|Psi> before Bob's
/// displacement is applied. `j <= m`.
double cloner_branch_coefficient(int m, int j, double transmission, const TmsvParams& tmsv);

/// Unnormalized conditional state (1/sqrt(pi)) <c|Psi> of Bob's two modes
/// after Charlie heterodynes outcome `c`, for input coherent state `alpha_k`.
///
/// Charlie's mode carries displacement `charlie_scale * sqrt(T) * alpha_k`,
/// Bob's reflected mode sqrt(1-T) * alpha_k. `dim` truncates B1'; B2 holds
/// the TMSV photon numbers up to `tmsv.cutoff()`. Throws TruncationError when
/// the lost norm exceeds `tolerance`.
TwoModeVector cloner_conditional_state(Complex alpha_k, double transmission,
                                       const TmsvParams& tmsv, Complex c, int dim,
                                       double charlie_scale, double tolerance = 1e-9);

}  // namespace cvqds
