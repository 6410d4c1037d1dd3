#pragma once

// Dense complex linear algebra for finite Hilbert spaces: normalized state
// vectors, operators, tensor products, Pauli strings, and spectrally
// decomposed observables.
//
// Conventions used throughout the library:
//   * the computational basis is ordered lexicographically with tensor
//     factor 0 as the most significant factor;
//   * |up> = (1,0), |down> = (0,1), |up_x> = (1,1)/sqrt(2),
//     |up_y> = (1,i)/sqrt(2);
//   * inner products are conjugate-linear in the first (bra) argument.
//
// Observables never pass through an eigensolver: they enter the library in
// spectral form, either as Pauli strings (involutions, so the projectors are
// (I +/- P)/2), as rank-deficient projectors, or as user-supplied
// (eigenvalue, projector) lists that are validated against the structural
// invariants below.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ppsim {

template <typename T = double>
using complex_t = std::complex<T>;

template <typename T = double>
using Matrix = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T = double>
using Vector = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, 1>;

// Default tolerances: structural checks (projector algebra, normalization)
// and exact algebraic identities. Every validating routine accepts an
// explicit tolerance, so both are configurable per call site.
template <typename T>
inline constexpr T structural_tol = T(1e-10);
template <typename T>
inline constexpr T algebra_tol = T(1e-12);

// Hard cap on Hilbert-space dimension; everything in this library is dense.
inline constexpr int max_dimension = 64;

namespace detail {

template <typename T>
bool is_finite(const complex_t<T>& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

template <typename T>
T max_abs(const Matrix<T>& m) {
    return m.rows() == 0 ? T(0) : m.cwiseAbs().maxCoeff();
}

}  // namespace detail

template <typename T>
Matrix<T> identity(int dim) {
    return Matrix<T>::Identity(dim, dim);
}

// A normalized state vector over a finite Hilbert space. The constructor
// normalizes its input, so every live StateVector has unit norm. An optional
// list of tensor-factor dimensions records product structure; its product
// must equal the total dimension.
template <typename T = double>
class StateVector {
  public:
    explicit StateVector(Vector<T> amps, std::vector<int> factors = {})
        : amps_(std::move(amps)), factors_(std::move(factors)) {
        if (amps_.size() == 0) {
            throw std::invalid_argument("StateVector: empty amplitude list");
        }
        if (amps_.size() > max_dimension) {
            throw std::invalid_argument("StateVector: dimension exceeds cap of 64");
        }
        for (Eigen::Index i = 0; i < amps_.size(); ++i) {
            if (!detail::is_finite<T>(amps_[i])) {
                throw std::invalid_argument("StateVector: non-finite amplitude");
            }
        }
        const T norm = amps_.norm();
        if (!(norm > T(0)) || !std::isfinite(norm)) {
            throw std::invalid_argument("StateVector: cannot normalize zero vector");
        }
        amps_ /= norm;
        if (!factors_.empty()) {
            long long prod = 1;
            for (int f : factors_) {
                if (f <= 0) {
                    throw std::invalid_argument("StateVector: nonpositive factor dimension");
                }
                prod *= f;
            }
            if (prod != amps_.size()) {
                throw std::invalid_argument(
                    "StateVector: product of factor dimensions does not equal dim");
            }
        }
    }

    int dim() const { return static_cast<int>(amps_.size()); }
    const Vector<T>& amps() const { return amps_; }
    const std::vector<int>& factors() const { return factors_; }

  private:
    Vector<T> amps_;
    std::vector<int> factors_;
};

// <bra|ket>, conjugate-linear in the first argument.
template <typename T>
complex_t<T> inner(const StateVector<T>& bra, const StateVector<T>& ket) {
    if (bra.dim() != ket.dim()) {
        throw std::invalid_argument("inner: dimension mismatch");
    }
    return bra.amps().dot(ket.amps());
}

// Kronecker (tensor) product; factor `a` is the more significant one, so
// entry ((i*db + k), (j*db + l)) = a(i,j) * b(k,l).
template <typename T>
Matrix<T> kron(const Matrix<T>& a, const Matrix<T>& b) {
    Matrix<T> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

template <typename T>
Vector<T> kron(const Vector<T>& a, const Vector<T>& b) {
    Vector<T> out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a[i] * b;
    }
    return out;
}

// Tensor product of states; concatenates the factor lists.
template <typename T>
StateVector<T> kron(const StateVector<T>& a, const StateVector<T>& b) {
    std::vector<int> factors = a.factors().empty() ? std::vector<int>{a.dim()} : a.factors();
    const std::vector<int> bf = b.factors().empty() ? std::vector<int>{b.dim()} : b.factors();
    factors.insert(factors.end(), bf.begin(), bf.end());
    return StateVector<T>(kron(a.amps(), b.amps()), std::move(factors));
}

// Single-qubit Pauli matrices and named basis states.
template <typename T = double>
Matrix<T> sigma_x() {
    Matrix<T> m(2, 2);
    m << complex_t<T>(0), complex_t<T>(1), complex_t<T>(1), complex_t<T>(0);
    return m;
}

template <typename T = double>
Matrix<T> sigma_y() {
    Matrix<T> m(2, 2);
    m << complex_t<T>(0), complex_t<T>(0, -1), complex_t<T>(0, 1), complex_t<T>(0);
    return m;
}

template <typename T = double>
Matrix<T> sigma_z() {
    Matrix<T> m(2, 2);
    m << complex_t<T>(1), complex_t<T>(0), complex_t<T>(0), complex_t<T>(-1);
    return m;
}

template <typename T = double>
StateVector<T> qubit_up() {
    Vector<T> v(2);
    v << complex_t<T>(1), complex_t<T>(0);
    return StateVector<T>(std::move(v));
}

template <typename T = double>
StateVector<T> qubit_down() {
    Vector<T> v(2);
    v << complex_t<T>(0), complex_t<T>(1);
    return StateVector<T>(std::move(v));
}

template <typename T = double>
StateVector<T> qubit_up_x() {
    Vector<T> v(2);
    v << complex_t<T>(1), complex_t<T>(1);
    return StateVector<T>(std::move(v));
}

template <typename T = double>
StateVector<T> qubit_down_x() {
    Vector<T> v(2);
    v << complex_t<T>(1), complex_t<T>(-1);
    return StateVector<T>(std::move(v));
}

template <typename T = double>
StateVector<T> qubit_up_y() {
    Vector<T> v(2);
    v << complex_t<T>(1), complex_t<T>(0, 1);
    return StateVector<T>(std::move(v));
}

template <typename T = double>
StateVector<T> qubit_down_y() {
    Vector<T> v(2);
    v << complex_t<T>(1), complex_t<T>(0, -1);
    return StateVector<T>(std::move(v));
}

enum class Axis { x, y, z };

inline char axis_name(Axis a) {
    switch (a) {
        case Axis::x: return 'x';
        case Axis::y: return 'y';
        case Axis::z: return 'z';
    }
    throw std::invalid_argument("axis_name: unknown axis");
}

template <typename T = double>
Matrix<T> pauli_matrix(Axis a) {
    switch (a) {
        case Axis::x: return sigma_x<T>();
        case Axis::y: return sigma_y<T>();
        case Axis::z: return sigma_z<T>();
    }
    throw std::invalid_argument("pauli_matrix: unknown axis");
}

// A Hermitian observable given as a list of (real eigenvalue, projector)
// pairs. The constructor validates, within `tol`:
//   * each projector is Hermitian and idempotent,
//   * the projectors resolve the identity,
//   * sum of eigenvalue * projector reconstructs `op`,
//   * eigenvalues are pairwise distinct.
template <typename T = double>
class SpectralObservable {
  public:
    using Branch = std::pair<T, Matrix<T>>;

    SpectralObservable(std::string name, Matrix<T> op, std::vector<Branch> spectrum,
                       T tol = structural_tol<T>)
        : name_(std::move(name)), op_(std::move(op)), spectrum_(std::move(spectrum)) {
        if (op_.rows() != op_.cols() || op_.rows() == 0) {
            throw std::invalid_argument("SpectralObservable '" + name_ + "': operator not square");
        }
        if (op_.rows() > max_dimension) {
            throw std::invalid_argument("SpectralObservable '" + name_ +
                                        "': dimension exceeds cap of 64");
        }
        if (spectrum_.empty()) {
            throw std::invalid_argument("SpectralObservable '" + name_ + "': empty spectrum");
        }
        const int d = dim();
        const Matrix<T> eye = identity<T>(d);
        Matrix<T> proj_sum = Matrix<T>::Zero(d, d);
        Matrix<T> reconstruction = Matrix<T>::Zero(d, d);
        for (const auto& [eig, proj] : spectrum_) {
            if (!std::isfinite(eig)) {
                throw std::invalid_argument("SpectralObservable '" + name_ +
                                            "': non-finite eigenvalue");
            }
            if (proj.rows() != d || proj.cols() != d) {
                throw std::invalid_argument("SpectralObservable '" + name_ +
                                            "': projector dimension mismatch");
            }
            if (detail::max_abs<T>(proj - proj.adjoint()) > tol) {
                throw std::invalid_argument("SpectralObservable '" + name_ +
                                            "': projector not Hermitian");
            }
            if (detail::max_abs<T>(proj * proj - proj) > tol) {
                throw std::invalid_argument("SpectralObservable '" + name_ +
                                            "': projector not idempotent");
            }
            proj_sum += proj;
            reconstruction += complex_t<T>(eig) * proj;
        }
        if (detail::max_abs<T>(proj_sum - eye) > tol) {
            throw std::invalid_argument("SpectralObservable '" + name_ +
                                        "': projectors do not resolve the identity");
        }
        if (detail::max_abs<T>(reconstruction - op_) > tol) {
            throw std::invalid_argument("SpectralObservable '" + name_ +
                                        "': spectrum does not reconstruct the operator");
        }
        for (std::size_t i = 0; i < spectrum_.size(); ++i) {
            for (std::size_t j = i + 1; j < spectrum_.size(); ++j) {
                if (std::abs(spectrum_[i].first - spectrum_[j].first) <= tol) {
                    throw std::invalid_argument("SpectralObservable '" + name_ +
                                                "': eigenvalues not pairwise distinct");
                }
            }
        }
    }

    const std::string& name() const { return name_; }
    const Matrix<T>& op() const { return op_; }
    const std::vector<Branch>& spectrum() const { return spectrum_; }
    int dim() const { return static_cast<int>(op_.rows()); }

    // Projector onto the eigenspace of `eigenvalue` (must be in the spectrum).
    const Matrix<T>& projector(T eigenvalue, T tol = structural_tol<T>) const {
        for (const auto& [eig, proj] : spectrum_) {
            if (std::abs(eig - eigenvalue) <= tol) {
                return proj;
            }
        }
        throw std::invalid_argument("SpectralObservable '" + name_ +
                                    "': eigenvalue not in spectrum");
    }

  private:
    std::string name_;
    Matrix<T> op_;
    std::vector<Branch> spectrum_;
};

// Tensor product of Pauli matrices on the listed sites (identity elsewhere),
// as a SpectralObservable. Any such string P is an involution (P^2 = I), so
// its spectrum is {(+1, (I+P)/2), (-1, (I-P)/2)}.
template <typename T = double>
SpectralObservable<T> pauli_string(const std::vector<std::pair<int, Axis>>& spec, int n_sites,
                                   std::string name = {}) {
    if (n_sites <= 0 || n_sites > 6) {
        throw std::invalid_argument("pauli_string: n_sites must be in [1, 6]");
    }
    if (spec.empty()) {
        throw std::invalid_argument("pauli_string: empty site list");
    }
    std::vector<Axis> axis_at(static_cast<std::size_t>(n_sites), Axis::x);
    std::vector<bool> used(static_cast<std::size_t>(n_sites), false);
    for (const auto& [site, axis] : spec) {
        if (site < 0 || site >= n_sites) {
            throw std::invalid_argument("pauli_string: site index out of range");
        }
        if (used[static_cast<std::size_t>(site)]) {
            throw std::invalid_argument("pauli_string: duplicate site index");
        }
        used[static_cast<std::size_t>(site)] = true;
        axis_at[static_cast<std::size_t>(site)] = axis;
    }
    Matrix<T> p = Matrix<T>::Identity(1, 1);
    for (int s = 0; s < n_sites; ++s) {
        p = kron(p, used[static_cast<std::size_t>(s)] ? pauli_matrix<T>(axis_at[static_cast<std::size_t>(s)])
                                                      : identity<T>(2));
    }
    if (name.empty()) {
        for (const auto& [site, axis] : spec) {
            if (!name.empty()) {
                name += ' ';
            }
            name += axis_name(axis);
            name += '@';
            name += std::to_string(site);
        }
    }
    const int d = static_cast<int>(p.rows());
    const Matrix<T> eye = identity<T>(d);
    std::vector<typename SpectralObservable<T>::Branch> spectrum;
    spectrum.emplace_back(T(1), ((eye + p) / T(2)).eval());
    spectrum.emplace_back(T(-1), ((eye - p) / T(2)).eval());
    return SpectralObservable<T>(std::move(name), std::move(p), std::move(spectrum));
}

// Observable for a yes/no question: spectrum {(1, proj), (0, I - proj)}.
// Degenerate inputs (proj = I or proj = 0 within tol) collapse to a single
// spectral entry.
template <typename T = double>
SpectralObservable<T> projector_observable(std::string name, const Matrix<T>& proj,
                                           T tol = structural_tol<T>) {
    if (proj.rows() != proj.cols() || proj.rows() == 0) {
        throw std::invalid_argument("projector_observable '" + name + "': matrix not square");
    }
    if (detail::max_abs<T>(proj - proj.adjoint()) > tol) {
        throw std::invalid_argument("projector_observable '" + name + "': not Hermitian");
    }
    if (detail::max_abs<T>(proj * proj - proj) > tol) {
        throw std::invalid_argument("projector_observable '" + name + "': not idempotent");
    }
    const int d = static_cast<int>(proj.rows());
    const Matrix<T> eye = identity<T>(d);
    std::vector<typename SpectralObservable<T>::Branch> spectrum;
    if (detail::max_abs<T>(proj - eye) <= tol) {
        spectrum.emplace_back(T(1), eye);
    } else if (detail::max_abs<T>(proj) <= tol) {
        spectrum.emplace_back(T(0), eye);
    } else {
        spectrum.emplace_back(T(1), proj);
        spectrum.emplace_back(T(0), (eye - proj).eval());
    }
    return SpectralObservable<T>(std::move(name), proj, std::move(spectrum));
}

}  // namespace ppsim
