#include <doctest.h>

#include <random>

#include "cavistim/dynamics.hpp"
#include "cavistim/oracle.hpp"

using namespace cavistim;

namespace {

DensityMatrix random_density(std::size_t dim, unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> n;
    Eigen::MatrixXcd g(dim, dim);
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = Complex(n(rng), n(rng));
    }
    DensityMatrix rho = g * g.adjoint();
    return rho / rho.trace();
}

Eigen::MatrixXcd random_matrix(std::size_t dim, unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> n;
    Eigen::MatrixXcd m(dim, dim);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = Complex(n(rng), n(rng));
    }
    return m;
}

}  // namespace

TEST_CASE("SparseHermitian merges, mirrors and rejects complex diagonals")
{
    const SparseHermitian h(3, {{0, 1, {1.0, 2.0}}, {0, 1, {1.0, 0.0}}, {2, 2, {5.0, 0.0}}, {1, 2, {0.0, 0.0}}});
    CHECK(h.at(0, 1) == Complex(2.0, 2.0));
    CHECK(h.at(1, 0) == Complex(2.0, -2.0));
    CHECK(h.at(1, 2) == Complex(0.0, 0.0));
    CHECK(h.entries().size() == 2);
    const auto d = h.to_dense();
    CHECK((d - d.adjoint()).norm() == 0.0);
    CHECK_THROWS(SparseHermitian(2, {{0, 0, {1.0, 1.0}}}));
}

TEST_CASE("Hamiltonian structure")
{
    const PhysParams p;
    const auto vs = validate_scenario(build_baseline(1, p));
    const Basis b = generate_basis(vs);
    const SparseHermitian h = build_hamiltonian(vs, b);
    const auto s = *b.index_of(BasisState{{0, 0}, {level::S}});
    const auto a = *b.index_of(BasisState{{1, 0}, {level::A}});
    const auto bb = *b.index_of(BasisState{{0, 1}, {level::B}});
    CHECK(h.at(s, a).real() == doctest::Approx(p.g_a));
    CHECK(h.at(s, bb).real() == doctest::Approx(p.g_b));
    // resonant: all three states degenerate
    CHECK(h.at(s, s).real() == doctest::Approx(h.at(a, a).real()));
    CHECK(h.at(s, s).real() == doctest::Approx(h.at(bb, bb).real()));
}

TEST_CASE("jump operator carries sqrt(n)")
{
    PhysParams p;
    auto cfg = build_config1(1, 2, p);
    cfg.leaks.push_back({1, "A", 0.3, "donor"});
    const auto vs = validate_scenario(cfg);
    const Basis b = generate_basis(vs);
    const auto jumps = build_jump_operators(vs, b);
    REQUIRE(jumps.size() == 3);
    const auto& donor = jumps[2];
    CHECK(donor.sink_label == "donor");
    CHECK(donor.rate == 0.3);
    const auto from = *b.index_of(BasisState{{0, 0, 2}, {level::S}});
    const auto to = *b.index_of(BasisState{{0, 0, 1}, {level::S}});
    bool found = false;
    for (const auto& e : donor.matrix) {
        if (e.row == to && e.col == from) {
            CHECK(e.value.real() == doctest::Approx(std::sqrt(2.0)));
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("generator properties on config2")
{
    const auto vs = validate_scenario(build_config2(1, 1, PhysParams{}));
    const OpenSystem sys = assemble(vs);
    const auto dim = sys.basis.dim();
    const DensityMatrix rho = random_density(dim, 1);
    const DensityMatrix drho = sys.generator(rho);

    SUBCASE("trace annihilation") { CHECK(std::abs(drho.trace()) < 1e-13); }
    SUBCASE("Hermiticity preserved") { CHECK((drho - drho.adjoint()).cwiseAbs().maxCoeff() < 1e-14); }
    SUBCASE("linearity")
    {
        const Eigen::MatrixXcd x = random_matrix(dim, 2);
        const Eigen::MatrixXcd y = random_matrix(dim, 3);
        const Complex a(0.3, -1.2), c(-2.0, 0.5);
        const Eigen::MatrixXcd lhs = sys.generator(a * x + c * y);
        const Eigen::MatrixXcd rhs = a * sys.generator(x) + c * sys.generator(y);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("matches the dense Liouvillian")
    {
        const oracle::DenseLiouvillian dense(sys.hamiltonian, sys.jumps);
        const Eigen::MatrixXcd x = random_matrix(dim, 4);
        CHECK((dense.apply(x) - sys.generator(x)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((lindblad_rhs(sys.hamiltonian, sys.jumps, x) - sys.generator(x)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("H commutes with the excitation number")
    {
        const auto n = excitation_operator(vs, sys.basis);
        const Eigen::MatrixXcd h = sys.hamiltonian.to_dense();
        const Eigen::MatrixXcd nd = n.diagonal.cast<Complex>().asDiagonal();
        CHECK((h * nd - nd * h).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("observables")
{
    const auto vs = validate_scenario(build_config2(1, 1, PhysParams{}));
    const Basis b = generate_basis(vs);
    const auto init = *b.index_of(initial_basis_state(vs));
    const DensityMatrix rho = pure_state(b.dim(), init);

    CHECK(expectation(population_operator(vs, b, AtomLevelSelector{0, level::S}), rho) == 1.0);
    CHECK(expectation(population_operator(vs, b, AtomLevelSelector{1, 0}), rho) == 1.0);
    CHECK(expectation(population_operator(vs, b, ModeOccupationSelector{0, "A"}), rho) == 0.0);
    CHECK(expectation(excitation_operator(vs, b), rho) == 2.0);
    CHECK_THROWS_AS(population_operator(vs, b, AtomLevelSelector{5, 0}), UnknownSelector);
    CHECK_THROWS_AS(population_operator(vs, b, ModeOccupationSelector{0, "Q"}), UnknownSelector);

    DensityMatrix bad = rho;
    bad(init, init) = Complex(1.0, 1e-6);
    CHECK_THROWS_AS(expectation(population_operator(vs, b, AtomLevelSelector{0, level::S}), bad), CorruptState);
}
