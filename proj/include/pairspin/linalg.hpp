#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace pairspin {

using cplx = std::complex<double>;

// Dense complex matrix, sized for the small Hilbert spaces here (<= 12x12).
class CMat {
public:
    CMat() = default;
    explicit CMat(int n) : n_(n), a_(std::size_t(n) * n, cplx(0.0, 0.0)) {}

    static CMat identity(int n) {
        CMat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int dim() const { return n_; }
    cplx& operator()(int i, int j) { return a_[std::size_t(i) * n_ + j]; }
    const cplx& operator()(int i, int j) const { return a_[std::size_t(i) * n_ + j]; }

    CMat operator+(const CMat& o) const {
        CMat r(n_);
        for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] + o.a_[k];
        return r;
    }
    CMat operator-(const CMat& o) const {
        CMat r(n_);
        for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] - o.a_[k];
        return r;
    }
    CMat operator*(double s) const {
        CMat r(n_);
        for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] * s;
        return r;
    }
    CMat operator*(cplx s) const {
        CMat r(n_);
        for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] * s;
        return r;
    }
    CMat& operator+=(const CMat& o) {
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }

    CMat operator*(const CMat& o) const {
        CMat r(n_);
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < n_; ++k) {
                const cplx aik = (*this)(i, k);
                if (aik == cplx(0.0, 0.0)) continue;
                for (int j = 0; j < n_; ++j) r(i, j) += aik * o(k, j);
            }
        return r;
    }

    CMat adjoint() const {
        CMat r(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    cplx trace() const {
        cplx t = 0.0;
        for (int i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& v : a_) s += std::norm(v);
        return std::sqrt(s);
    }

    double hermiticity_error() const {
        double e = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = i; j < n_; ++j)
                e = std::max(e, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return e;
    }

private:
    int n_ = 0;
    std::vector<cplx> a_;
};

inline CMat kron(const CMat& a, const CMat& b) {
    const int na = a.dim(), nb = b.dim();
    CMat r(na * nb);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx(0.0, 0.0)) continue;
            for (int k = 0; k < nb; ++k)
                for (int l = 0; l < nb; ++l)
                    r(i * nb + k, j * nb + l) = aij * b(k, l);
        }
    return r;
}

struct EigenDecomposition {
    std::vector<double> eigenvalues;  // ascending
    CMat eigenvectors;                // columns, orthonormal
};

// Cyclic Jacobi for complex Hermitian matrices. Each rotation zeroes one
// off-diagonal pair; sweeps repeat until the off-diagonal norm falls below
// tol * ||H||.
inline EigenDecomposition jacobi_eigh(const CMat& h, double tol = 1e-14, int max_sweeps = 60) {
    const int n = h.dim();
    if (h.hermiticity_error() > 1e-9 * (1.0 + h.frobenius_norm()))
        throw std::invalid_argument("jacobi_eigh: matrix is not Hermitian");

    CMat a = h;
    CMat v = CMat::identity(n);
    const double scale = std::max(h.frobenius_norm(), 1e-300);

    auto offdiag = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += std::norm(a(i, j));
        return std::sqrt(2.0 * s);
    };

    for (int sweep = 0; sweep < max_sweeps && offdiag() > tol * scale; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double m = std::abs(apq);
                if (m <= 1e-300) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = 0.5 * std::atan2(2.0 * m, app - aqq);
                const double c = std::cos(theta);
                const cplx phase = apq / m;
                const cplx s = std::sin(theta) * phase;  // J = [[c, -s],[conj(s), c]]

                for (int i = 0; i < n; ++i) {  // columns: A <- A J
                    const cplx aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip + std::conj(s) * aiq;
                    a(i, q) = -s * aip + c * aiq;
                }
                for (int j = 0; j < n; ++j) {  // rows: A <- J^dagger A
                    const cplx apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj + s * aqj;
                    a(q, j) = -std::conj(s) * apj + c * aqj;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (int i = 0; i < n; ++i) {  // accumulate V <- V J
                    const cplx vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip + std::conj(s) * viq;
                    v(i, q) = -s * vip + c * viq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = CMat(n);
    for (int k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]).real();
        for (int i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    }
    return out;
}

inline double min_eigenvalue(const CMat& h) {
    return jacobi_eigh(h).eigenvalues.front();
}

}  // namespace pairspin
