#pragma once

// Points of the projective line over F_p and binary forms of degree d,
// stored as coefficients a_0..a_d of x^(d-i) z^i.

#include <theta_strata/prime_field.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace theta_strata {

// Canonical representative: (a, 1) for affine points, (1, 0) for infinity.
struct ProjPoint {
    Elem x = 0;
    Elem z = 1;

    static ProjPoint affine(Elem a) { return {a, 1}; }
    static ProjPoint infinity() { return {1, 0}; }

    bool is_infinity() const { return z == 0; }

    std::string to_string() const { return is_infinity() ? std::string("inf") : std::to_string(x); }

    friend auto operator<=>(const ProjPoint&, const ProjPoint&) = default;
};

inline ProjPoint canonical_point(const PrimeField& f, Elem x, Elem z) {
    x = x % f.p();
    z = z % f.p();
    if (z != 0) return ProjPoint::affine(f.div(x, z));
    if (x == 0) throw DomainError("(0:0) is not a point of the projective line");
    return ProjPoint::infinity();
}

inline ProjPoint canonical_point(const PrimeField& f, std::int64_t x, std::int64_t z) {
    return canonical_point(f, f.reduce(x), f.reduce(z));
}

// Integer model of a point: an integer, or infinity when empty.
using IntegerPoint = std::optional<std::int64_t>;

inline ProjPoint reduce_point(const PrimeField& f, const IntegerPoint& q) {
    return q ? ProjPoint::affine(f.reduce(*q)) : ProjPoint::infinity();
}

// All p + 1 points: 0..p-1 then infinity.
inline std::vector<ProjPoint> all_points(const PrimeField& f) {
    std::vector<ProjPoint> out;
    for (Elem a = 0; a < f.p(); ++a) out.push_back(ProjPoint::affine(a));
    out.push_back(ProjPoint::infinity());
    return out;
}

// Row of monomial values x^(d-i) z^i at q; empty for d < 0.
inline std::vector<Elem> evaluation_row(const PrimeField& f, int degree, ProjPoint q) {
    if (degree < 0) return {};
    std::vector<Elem> row(static_cast<std::size_t>(degree) + 1, 0);
    if (q.is_infinity()) {
        row[0] = 1;
        return row;
    }
    Elem power = 1;
    for (int i = degree; i >= 0; --i) {
        row[static_cast<std::size_t>(i)] = power;
        power = f.mul(power, q.x);
    }
    return row;
}

inline Elem evaluate_form(const PrimeField& f, const std::vector<Elem>& coefficients, ProjPoint q) {
    auto row = evaluation_row(f, static_cast<int>(coefficients.size()) - 1, q);
    Elem s = 0;
    for (std::size_t i = 0; i < row.size(); ++i) s = f.add(s, f.mul(row[i], coefficients[i]));
    return s;
}

namespace detail {

inline Elem binomial_mod(const PrimeField& f, int n, int k) {
    if (k < 0 || k > n) return 0;
    std::vector<Elem> row(static_cast<std::size_t>(k) + 1, 0);
    row[0] = 1;
    for (int i = 1; i <= n; ++i)
        for (int j = std::min(i, k); j >= 1; --j) row[static_cast<std::size_t>(j)] = f.add(row[static_cast<std::size_t>(j)], row[static_cast<std::size_t>(j) - 1]);
    return row[static_cast<std::size_t>(k)];
}

} // namespace detail

// Linear conditions for a form of the given degree to vanish to order at
// least `multiplicity` at q. Affine points use Hasse derivatives, so the
// conditions stay independent in small characteristic.
inline std::vector<std::vector<Elem>> vanishing_rows(const PrimeField& f, int degree, ProjPoint q, int multiplicity) {
    std::vector<std::vector<Elem>> rows;
    if (degree < 0) return rows;
    const int n = degree + 1;
    for (int k = 0; k < multiplicity && k < n; ++k) {
        std::vector<Elem> row(static_cast<std::size_t>(n), 0);
        if (q.is_infinity()) {
            row[static_cast<std::size_t>(k)] = 1;
        } else {
            for (int i = 0; i + k <= degree; ++i)
                row[static_cast<std::size_t>(i)] =
                    f.mul(detail::binomial_mod(f, degree - i, k), f.pow(q.x, static_cast<std::uint64_t>(degree - i - k)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// The linear form vanishing exactly at q.
inline std::vector<Elem> linear_form_at(const PrimeField& f, ProjPoint q) {
    if (q.is_infinity()) return {0, 1};
    return {1, f.neg(q.x)};
}

inline std::vector<Elem> multiply_forms(const PrimeField& f, const std::vector<Elem>& a, const std::vector<Elem>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<Elem> out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = f.add(out[i + j], f.mul(a[i], b[j]));
    return out;
}

// Product of the linear forms at the given points (the constant 1 if none).
inline std::vector<Elem> form_with_zeros(const PrimeField& f, const std::vector<ProjPoint>& zeros) {
    std::vector<Elem> s{1};
    for (const auto& q : zeros) s = multiply_forms(f, s, linear_form_at(f, q));
    return s;
}

} // namespace theta_strata
