#include "bcclear/linear_solve.hpp"

#include <cassert>
#include <utility>

namespace bcclear {

std::optional<std::vector<Rational>> solve_exact(Matrix<Rational> a, std::vector<Rational> b) {
    const std::size_t n = a.rows();
    assert(a.cols() == n && b.size() == n);

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a(pivot, col) == 0) ++pivot;
        if (pivot == n) return std::nullopt;
        if (pivot != col) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a(col, k), a(pivot, k));
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t row = col + 1; row < n; ++row) {
            if (a(row, col) == 0) continue;
            const Rational factor = a(row, col) / a(col, col);
            for (std::size_t k = col; k < n; ++k) a(row, k) -= factor * a(col, k);
            b[row] -= factor * b[col];
        }
    }

    std::vector<Rational> x(n);
    for (std::size_t i = n; i-- > 0;) {
        Rational acc = b[i];
        for (std::size_t k = i + 1; k < n; ++k) acc -= a(i, k) * x[k];
        x[i] = acc / a(i, i);
    }
    return x;
}

}  // namespace bcclear
