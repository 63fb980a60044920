#pragma once

// Arithmetic and exact linear algebra over a prime field F_p with p chosen
// at run time (p < 2^31).

#include <theta_strata/error.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace theta_strata {

using Elem = std::uint32_t;

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

class PrimeField {
public:
    explicit PrimeField(std::uint32_t p) : p_(p) {
        if (p >= (1u << 31) || !is_prime(p)) throw DomainError("field characteristic must be a prime below 2^31, got " + std::to_string(p));
    }

    std::uint32_t p() const { return p_; }

    Elem reduce(std::int64_t x) const {
        std::int64_t r = x % static_cast<std::int64_t>(p_);
        return static_cast<Elem>(r < 0 ? r + p_ : r);
    }

    Elem add(Elem a, Elem b) const {
        Elem s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    Elem sub(Elem a, Elem b) const { return a >= b ? a - b : a + p_ - b; }
    Elem neg(Elem a) const { return a == 0 ? 0 : p_ - a; }
    Elem mul(Elem a, Elem b) const { return static_cast<Elem>(static_cast<std::uint64_t>(a) * b % p_); }

    Elem pow(Elem a, std::uint64_t e) const {
        Elem r = 1;
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }

    Elem inv(Elem a) const {
        if (a == 0) throw DomainError("inverse of zero in F_" + std::to_string(p_));
        return pow(a, p_ - 2);
    }

    Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }

    // Symmetric representative in (-p/2, p/2].
    std::int64_t lift(Elem a) const { return a > p_ / 2 ? static_cast<std::int64_t>(a) - p_ : a; }

    friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.p_ == b.p_; }

private:
    std::uint32_t p_;
};

// Dense row-major matrix over F_p.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Elem& at(int r, int c) { return data_[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c)]; }
    Elem at(int r, int c) const { return data_[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c)]; }

    void append_row(const std::vector<Elem>& row) {
        if (static_cast<int>(row.size()) != cols_) throw DomainError("row length mismatch");
        data_.insert(data_.end(), row.begin(), row.end());
        ++rows_;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Elem> data_;
};

struct RowEchelon {
    Matrix reduced;           // reduced row echelon form
    std::vector<int> pivots;  // pivot column of each nonzero row
    int rank() const { return static_cast<int>(pivots.size()); }
};

inline RowEchelon row_reduce(const PrimeField& f, Matrix m) {
    RowEchelon out;
    int row = 0;
    for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
        int pivot = -1;
        for (int r = row; r < m.rows(); ++r)
            if (m.at(r, col)) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        if (pivot != row)
            for (int c = 0; c < m.cols(); ++c) std::swap(m.at(pivot, c), m.at(row, c));
        Elem scale = f.inv(m.at(row, col));
        for (int c = col; c < m.cols(); ++c) m.at(row, c) = f.mul(m.at(row, c), scale);
        for (int r = 0; r < m.rows(); ++r) {
            if (r == row || !m.at(r, col)) continue;
            Elem factor = m.at(r, col);
            for (int c = col; c < m.cols(); ++c) m.at(r, c) = f.sub(m.at(r, c), f.mul(factor, m.at(row, c)));
        }
        out.pivots.push_back(col);
        ++row;
    }
    out.reduced = std::move(m);
    return out;
}

inline int rank(const PrimeField& f, const Matrix& m) { return row_reduce(f, m).rank(); }

// Basis of {x : m x = 0}, one vector per free column.
inline std::vector<std::vector<Elem>> nullspace(const PrimeField& f, const Matrix& m) {
    auto e = row_reduce(f, m);
    std::vector<char> is_pivot(static_cast<std::size_t>(m.cols()), 0);
    for (int c : e.pivots) is_pivot[static_cast<std::size_t>(c)] = 1;
    std::vector<std::vector<Elem>> basis;
    for (int free = 0; free < m.cols(); ++free) {
        if (is_pivot[static_cast<std::size_t>(free)]) continue;
        std::vector<Elem> v(static_cast<std::size_t>(m.cols()), 0);
        v[static_cast<std::size_t>(free)] = 1;
        for (int r = 0; r < e.rank(); ++r)
            v[static_cast<std::size_t>(e.pivots[static_cast<std::size_t>(r)])] = f.neg(e.reduced.at(r, free));
        basis.push_back(std::move(v));
    }
    return basis;
}

inline Elem determinant(const PrimeField& f, Matrix m) {
    if (m.rows() != m.cols()) throw DomainError("determinant of a non-square matrix");
    Elem det = 1;
    const int n = m.rows();
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r)
            if (m.at(r, col)) {
                pivot = r;
                break;
            }
        if (pivot < 0) return 0;
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(m.at(pivot, c), m.at(col, c));
            det = f.neg(det);
        }
        det = f.mul(det, m.at(col, col));
        Elem inv = f.inv(m.at(col, col));
        for (int r = col + 1; r < n; ++r) {
            if (!m.at(r, col)) continue;
            Elem factor = f.mul(m.at(r, col), inv);
            for (int c = col; c < n; ++c) m.at(r, c) = f.sub(m.at(r, c), f.mul(factor, m.at(col, c)));
        }
    }
    return det;
}

} // namespace theta_strata
