#include "cavistim/oracle.hpp"

#include <bit>
#include <cmath>
#include <cstdint>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace cavistim::oracle {

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b)
{
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

}  // namespace

DenseLiouvillian::DenseLiouvillian(const SparseHermitian& h, const std::vector<JumpOperator>& jumps)
    : dim_(h.dim())
{
    if (dim_ > kMaxDenseDim) {
        throw DimensionTooLarge("dense Liouvillian limited to dim <= " + std::to_string(kMaxDenseDim) + ", got " +
                                std::to_string(dim_));
    }
    const Eigen::MatrixXcd hd = h.to_dense();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim_, dim_);
    const Complex i{0.0, 1.0};
    // vec(A X B) = (B^T kron A) vec(X)
    l_ = -i * (kron(id, hd) - kron(hd.transpose(), id));
    for (const auto& jump : jumps) {
        const Eigen::MatrixXcd a = jump.to_dense();
        const Eigen::MatrixXcd ada = a.adjoint() * a;
        l_ += jump.rate * (kron(a.conjugate(), a) - 0.5 * kron(id, ada) - 0.5 * kron(ada.transpose(), id));
    }
}

DensityMatrix DenseLiouvillian::apply(const DensityMatrix& rho) const
{
    const Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
    const Eigen::VectorXcd out = l_ * v;
    return Eigen::Map<const DensityMatrix>(out.data(), rho.rows(), rho.cols());
}

DensityMatrix dense_propagate(const SparseHermitian& h, const std::vector<JumpOperator>& jumps,
                              const DensityMatrix& rho0, double t)
{
    const DenseLiouvillian l(h, jumps);
    if (t == 0.0) return rho0;
    const Eigen::MatrixXcd prop = (t * l.matrix()).exp();
    const Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho0.data(), rho0.size());
    const Eigen::VectorXcd out = prop * v;
    return Eigen::Map<const DensityMatrix>(out.data(), rho0.rows(), rho0.cols());
}

double jc_population(double g, int n_photons, double t)
{
    const double c = std::cos(g * std::sqrt(n_photons + 1.0) * t);
    return c * c;
}

Complex permanent(const Eigen::MatrixXcd& m)
{
    const auto n = m.rows();
    if (n != m.cols()) throw std::invalid_argument("permanent needs a square matrix");
    if (n == 0) return {1.0, 0.0};
    if (n > 30) throw std::invalid_argument("permanent: matrix too large for Ryser enumeration");

    // per(M) = (-1)^n sum_{S} (-1)^{|S|} prod_i sum_{j in S} m_ij, walking S in Gray-code order.
    Eigen::VectorXcd row_sums = Eigen::VectorXcd::Zero(n);
    Complex total{};
    const std::uint64_t subsets = std::uint64_t{1} << n;
    std::uint64_t gray = 0;
    for (std::uint64_t k = 1; k < subsets; ++k) {
        const int j = std::countr_zero(k);
        const std::uint64_t bit = std::uint64_t{1} << j;
        gray ^= bit;
        if (gray & bit) {
            row_sums += m.col(j);
        } else {
            row_sums -= m.col(j);
        }
        Complex prod{1.0, 0.0};
        for (Eigen::Index i = 0; i < n; ++i) prod *= row_sums[i];
        total += (std::popcount(gray) % 2 ? -1.0 : 1.0) * prod;
    }
    return (n % 2 ? -1.0 : 1.0) * total;
}

Eigen::MatrixXcd star_single_particle_propagator(int n_donors, double kappa, double t)
{
    const int n = n_donors + 1;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (int j = 1; j < n; ++j) k(0, j) = k(j, 0) = kappa;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
    const Complex i{0.0, 1.0};
    Eigen::VectorXcd phases(n);
    for (int j = 0; j < n; ++j) phases[j] = std::exp(-i * es.eigenvalues()[j] * t);
    const Eigen::MatrixXcd v = es.eigenvectors().cast<Complex>();
    return v * phases.asDiagonal() * v.adjoint();
}

double star_transfer_probability(int n_donors, double kappa, double t)
{
    if (n_donors < 1) throw std::invalid_argument("star transfer needs at least one donor");
    const Eigen::MatrixXcd u = star_single_particle_propagator(n_donors, kappa, t);
    // Output: all photons in site 0; inputs: one photon in each donor site.
    Eigen::MatrixXcd amp(n_donors, n_donors);
    for (int r = 0; r < n_donors; ++r) {
        for (int c = 0; c < n_donors; ++c) amp(r, c) = u(0, c + 1);
    }
    double fact = 1.0;
    for (int k = 2; k <= n_donors; ++k) fact *= k;
    return std::norm(permanent(amp)) / fact;
}

}  // namespace cavistim::oracle
