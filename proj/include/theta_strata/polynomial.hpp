#pragma once

#include <theta_strata/prime_field.hpp>

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace theta_strata {

// Sparse multivariate polynomial over F_p in a fixed number of variables.
class Polynomial {
public:
    using Exponents = std::vector<int>;

    Polynomial(PrimeField field, int variables) : field_(field), variables_(variables) {}

    int variables() const { return variables_; }
    const PrimeField& field() const { return field_; }
    const std::map<Exponents, Elem>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }

    void add_term(const Exponents& e, Elem c) {
        if (static_cast<int>(e.size()) != variables_) throw DomainError("monomial has wrong number of variables");
        Elem& slot = terms_[e];
        slot = field_.add(slot, c);
        if (slot == 0) terms_.erase(e);
    }

    int total_degree() const {
        int best = -1;
        for (const auto& [e, c] : terms_) {
            int d = 0;
            for (int x : e) d += x;
            best = std::max(best, d);
        }
        return best;
    }

    Elem evaluate(const std::vector<Elem>& point) const {
        if (static_cast<int>(point.size()) != variables_) throw DomainError("evaluation point has wrong dimension");
        Elem s = 0;
        for (const auto& [e, c] : terms_) {
            Elem t = c;
            for (int i = 0; i < variables_; ++i) t = field_.mul(t, field_.pow(point[static_cast<std::size_t>(i)], static_cast<std::uint64_t>(e[static_cast<std::size_t>(i)])));
            s = field_.add(s, t);
        }
        return s;
    }

    // Terms in descending monomial order, coefficients as symmetric lifts.
    std::string to_string(const std::string& var = "c") const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            std::int64_t c = field_.lift(it->second);
            os << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
            first = false;
            std::int64_t a = c < 0 ? -c : c;
            bool constant = true;
            for (int x : it->first) constant = constant && x == 0;
            if (a != 1 || constant) os << a;
            bool need_star = a != 1;
            for (int i = 0; i < variables_; ++i) {
                int x = it->first[static_cast<std::size_t>(i)];
                if (!x) continue;
                os << (need_star ? "*" : "") << var << i;
                if (x > 1) os << '^' << x;
                need_star = true;
            }
        }
        return os.str();
    }

private:
    PrimeField field_;
    int variables_;
    std::map<Exponents, Elem> terms_;
};

} // namespace theta_strata
