#include "cavistim/liouvillian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

namespace cavistim {

namespace {

const Complex kI{0.0, 1.0};

}  // namespace

SparseHermitian::SparseHermitian(std::size_t dim, std::vector<SparseEntry> upper) : dim_(dim)
{
    std::map<std::pair<std::size_t, std::size_t>, Complex> merged;
    for (const auto& e : upper) {
        if (e.row >= dim || e.col >= dim) throw std::out_of_range("SparseHermitian entry outside dimension");
        if (e.row > e.col) {
            merged[{e.col, e.row}] += std::conj(e.value);
        } else {
            merged[{e.row, e.col}] += e.value;
        }
    }
    entries_.reserve(merged.size());
    for (const auto& [rc, v] : merged) {
        if (v == Complex{}) continue;
        if (rc.first == rc.second && v.imag() != 0.0) {
            throw std::invalid_argument("SparseHermitian diagonal must be real");
        }
        entries_.push_back({rc.first, rc.second, v});
    }
}

Complex SparseHermitian::at(std::size_t row, std::size_t col) const
{
    const bool mirror = row > col;
    const auto key = mirror ? std::pair{col, row} : std::pair{row, col};
    auto it = std::lower_bound(entries_.begin(), entries_.end(), key, [](const SparseEntry& e, const auto& k) {
        return std::pair{e.row, e.col} < k;
    });
    if (it == entries_.end() || it->row != key.first || it->col != key.second) return {};
    return mirror ? std::conj(it->value) : it->value;
}

Eigen::MatrixXcd SparseHermitian::to_dense() const
{
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
    for (const auto& e : entries_) {
        m(e.row, e.col) = e.value;
        if (e.row != e.col) m(e.col, e.row) = std::conj(e.value);
    }
    return m;
}

Eigen::MatrixXcd JumpOperator::to_dense() const
{
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& e : matrix) m(e.row, e.col) += e.value;
    return m;
}

SparseHermitian build_hamiltonian(const ValidatedScenario& vs, const Basis& basis)
{
    const auto& cfg = vs.config();
    const Layout layout(cfg);
    std::vector<SparseEntry> upper;
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        const auto& s = basis[i];
        double energy = 0.0;
        for (std::size_t k = 0; k < layout.modes.size(); ++k) energy += layout.modes[k].frequency * s.photons[k];
        for (std::size_t a = 0; a < layout.atoms.size(); ++a) {
            energy += layout.atoms[a].spec->level_energies[s.levels[a]];
        }
        upper.push_back({i, i, energy});

        for (const auto& mv : successors(cfg, layout, s)) {
            if (mv.kind == Move::Kind::Leak) continue;
            const auto j = basis.index_of(mv.target);
            if (!j) throw std::logic_error("basis is not closed under the Hamiltonian");
            // Each Hermitian pair is visited from both ends; keep one.
            if (i < *j) upper.push_back({i, *j, mv.amplitude});
        }
    }
    return SparseHermitian(basis.dim(), std::move(upper));
}

std::vector<JumpOperator> build_jump_operators(const ValidatedScenario& vs, const Basis& basis)
{
    const auto& cfg = vs.config();
    const Layout layout(cfg);
    std::vector<JumpOperator> out;
    for (const auto& leak : cfg.leaks) {
        JumpOperator op;
        op.rate = leak.rate;
        op.dim = basis.dim();
        op.sink_label = leak.sink_label;
        op.mode_slot = *layout.mode_slot(leak.cavity, leak.mode_id);
        for (std::size_t i = 0; i < basis.dim(); ++i) {
            const int n = basis[i].photons[op.mode_slot];
            if (n == 0) continue;
            BasisState lowered = basis[i];
            lowered.photons[op.mode_slot] = n - 1;
            // Zero-rate channels do not participate in the closure; their
            // lowered states may be absent and the entry is irrelevant anyway.
            if (auto j = basis.index_of(lowered)) op.matrix.push_back({*j, i, std::sqrt(double(n))});
        }
        out.push_back(std::move(op));
    }
    return out;
}

MasterEquation::MasterEquation(const SparseHermitian& h, const std::vector<JumpOperator>& jumps) : dim_(h.dim())
{
    // Heff = H - i/2 sum_k rate_k A_k^+ A_k, assembled row-wise.
    std::vector<std::map<std::size_t, Complex>> rows(dim_);
    for (const auto& e : h.entries()) {
        rows[e.row][e.col] += e.value;
        if (e.row != e.col) rows[e.col][e.row] += std::conj(e.value);
    }
    for (const auto& jump : jumps) {
        if (jump.dim != dim_) throw std::invalid_argument("jump operator dimension mismatch");
        if (jump.rate == 0.0 || jump.matrix.empty()) continue;
        // (A^+ A)_{cd} = sum_r conj(A_{rc}) A_{rd}
        std::map<std::size_t, std::vector<const SparseEntry*>> by_row;
        for (const auto& e : jump.matrix) by_row[e.row].push_back(&e);
        for (const auto& [r, list] : by_row) {
            for (const auto* ec : list) {
                for (const auto* ed : list) {
                    rows[ec->col][ed->col] += -0.5 * kI * jump.rate * std::conj(ec->value) * ed->value;
                }
            }
        }
        jumps_.push_back({jump.rate, jump.matrix});
    }

    row_ptr_.assign(dim_ + 1, 0);
    double max_diag = 0.0;
    for (std::size_t r = 0; r < dim_; ++r) {
        for (const auto& [c, v] : rows[r]) {
            if (v == Complex{}) continue;
            col_.push_back(c);
            val_.push_back(v);
            if (c == r) max_diag = std::max(max_diag, std::abs(v.real()) + 2.0 * std::abs(v.imag()));
        }
        row_ptr_[r + 1] = col_.size();
    }
    stiffness_ = max_diag;
}

void MasterEquation::apply(const DensityMatrix& rho, DensityMatrix& out) const
{
    const std::size_t d = dim_;
    if (static_cast<std::size_t>(rho.rows()) != d || static_cast<std::size_t>(rho.cols()) != d) {
        throw std::invalid_argument("density matrix dimension mismatch");
    }
    out.setZero(d, d);
    const Complex* in = rho.data();
    Complex* res = out.data();

    // -i Heff rho
    for (std::size_t j = 0; j < d; ++j) {
        const Complex* col_in = in + j * d;
        Complex* col_out = res + j * d;
        for (std::size_t r = 0; r < d; ++r) {
            Complex acc{};
            for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) acc += val_[p] * col_in[col_[p]];
            col_out[r] += Complex(acc.imag(), -acc.real());
        }
    }
    // +i rho Heff^+ : column r of rho Heff^+ is sum_c conj(Heff_rc) rho(:, c)
    for (std::size_t r = 0; r < d; ++r) {
        Complex* col_out = res + r * d;
        for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
            const Complex w = kI * std::conj(val_[p]);
            const Complex* col_in = in + col_[p] * d;
            for (std::size_t i = 0; i < d; ++i) col_out[i] += w * col_in[i];
        }
    }
    // sum_k rate_k A_k rho A_k^+
    for (const auto& jump : jumps_) {
        for (const auto& q : jump.entries) {
            const Complex wq = jump.rate * std::conj(q.value);
            const Complex* col_in = in + q.col * d;
            Complex* col_out = res + q.row * d;
            for (const auto& p : jump.entries) col_out[p.row] += p.value * wq * col_in[p.col];
        }
    }
}

DensityMatrix MasterEquation::operator()(const DensityMatrix& rho) const
{
    DensityMatrix out;
    apply(rho, out);
    return out;
}

DensityMatrix lindblad_rhs(const SparseHermitian& h, const std::vector<JumpOperator>& jumps, const DensityMatrix& rho)
{
    return MasterEquation(h, jumps)(rho);
}

DiagonalObservable population_operator(const ValidatedScenario& vs, const Basis& basis,
                                       const PopulationSelector& selector)
{
    const Layout layout(vs.config());
    DiagonalObservable obs{Eigen::VectorXd::Zero(basis.dim())};
    if (const auto* sel = std::get_if<AtomLevelSelector>(&selector)) {
        if (sel->atom >= layout.atoms.size()) {
            throw UnknownSelector("no atom with index " + std::to_string(sel->atom));
        }
        const int nlev = static_cast<int>(layout.atoms[sel->atom].spec->level_energies.size());
        if (sel->level < 0 || sel->level >= nlev) {
            throw UnknownSelector("atom " + std::to_string(sel->atom) + " has no level " + std::to_string(sel->level));
        }
        for (std::size_t i = 0; i < basis.dim(); ++i) obs.diagonal[i] = basis[i].levels[sel->atom] == sel->level;
    } else {
        const auto& m = std::get<ModeOccupationSelector>(selector);
        const auto slot = layout.mode_slot(m.cavity, m.mode_id);
        if (!slot) {
            throw UnknownSelector("no mode '" + m.mode_id + "' in cavity " + std::to_string(m.cavity));
        }
        for (std::size_t i = 0; i < basis.dim(); ++i) obs.diagonal[i] = basis[i].photons[*slot];
    }
    return obs;
}

DiagonalObservable excitation_operator(const ValidatedScenario& vs, const Basis& basis)
{
    const Layout layout(vs.config());
    // depth[a][level]: excitations stored in the atom.
    std::vector<std::vector<int>> depth;
    for (const auto& slot : layout.atoms) {
        const auto& spec = *slot.spec;
        std::vector<int> d(spec.level_energies.size(), 0);
        std::vector<bool> known(d.size(), false);
        known[spec.initial_level] = true;
        std::queue<int> q;
        q.push(spec.initial_level);
        while (!q.empty()) {
            const int l = q.front();
            q.pop();
            for (const auto& t : spec.transitions) {
                int other = -1;
                int value = 0;
                if (t.upper_level == l) {
                    other = t.lower_level;
                    value = d[l] - 1;
                } else if (t.lower_level == l) {
                    other = t.upper_level;
                    value = d[l] + 1;
                } else {
                    continue;
                }
                if (!known[other]) {
                    known[other] = true;
                    d[other] = value;
                    q.push(other);
                } else if (d[other] != value) {
                    throw std::domain_error("atom transitions admit no consistent excitation count");
                }
            }
        }
        // count from the lowest reachable level
        int lowest = 0;
        for (std::size_t l = 0; l < d.size(); ++l) {
            if (known[l]) lowest = std::min(lowest, d[l]);
        }
        for (int& x : d) x -= lowest;
        depth.push_back(std::move(d));
    }

    DiagonalObservable obs{Eigen::VectorXd::Zero(basis.dim())};
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        double n = 0.0;
        for (int p : basis[i].photons) n += p;
        for (std::size_t a = 0; a < depth.size(); ++a) n += depth[a][basis[i].levels[a]];
        obs.diagonal[i] = n;
    }
    return obs;
}

double expectation(const DiagonalObservable& obs, const DensityMatrix& rho)
{
    if (obs.diagonal.size() != rho.rows() || rho.rows() != rho.cols()) {
        throw std::invalid_argument("observable and density matrix are not conformable");
    }
    double re = 0.0;
    double im = 0.0;
    for (Eigen::Index i = 0; i < obs.diagonal.size(); ++i) {
        re += obs.diagonal[i] * rho(i, i).real();
        im += obs.diagonal[i] * rho(i, i).imag();
    }
    if (std::abs(im) > kImagTolerance) {
        throw CorruptState("expectation value has imaginary part " + std::to_string(im));
    }
    return re;
}

DensityMatrix pure_state(std::size_t dim, std::size_t index)
{
    DensityMatrix rho = DensityMatrix::Zero(dim, dim);
    rho(index, index) = 1.0;
    return rho;
}

}  // namespace cavistim
