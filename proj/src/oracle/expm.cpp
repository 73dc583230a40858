#include <cmath>

#include "scrambler/errors.hpp"
#include "scrambler/oracle.hpp"

namespace scrambler::oracle {

namespace {

double norm1(const CMatrix& m) {
    double best = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.rows; ++i) s += std::abs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

}  // namespace

CMatrix unitary_step(const CMatrix& h, double dt) {
    if (h.rows != h.cols) throw UsageError("hamiltonian block must be square");
    const std::size_t n = h.rows;
    CMatrix a = cplx(0.0, -dt) * h;
    double norm = norm1(a);
    if (!std::isfinite(norm)) throw NumericalError("non-finite hamiltonian entry");

    int squarings = 0;
    while (norm > 0.1) {
        norm *= 0.5;
        ++squarings;
    }
    if (squarings > 0) a = cplx(std::ldexp(1.0, -squarings)) * a;

    CMatrix result = CMatrix::identity(n);
    CMatrix term = CMatrix::identity(n);
    double bound = 1.0;
    for (int k = 1; k < 60; ++k) {
        term = cplx(1.0 / k) * (term * a);
        result = result + term;
        bound *= norm / k;
        // Remaining terms are bounded by a geometric series in norm / (k+2).
        double tail = bound * norm / (k + 1) / (1.0 - norm / (k + 2));
        if (tail < 1e-17) break;
    }
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

double unitarity_deviation(const CMatrix& u) {
    CMatrix p = u.adjoint() * u;
    for (std::size_t i = 0; i < p.rows; ++i) p(i, i) -= 1.0;
    return p.max_abs();
}

}  // namespace scrambler::oracle
