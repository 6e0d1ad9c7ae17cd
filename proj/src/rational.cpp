#include "sg/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace sg {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

std::optional<Rational> parse_rational(const std::string& text) {
    if (auto slash = text.find('/'); slash != std::string::npos) {
        std::string num = text.substr(0, slash);
        std::string den = text.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) return std::nullopt;
        // Base 10 explicitly: the mpz string constructor defaults to base 0, which
        // reads a leading zero ("0125") as octal.
        mpz_class d(den, 10);
        if (d == 0) return std::nullopt;
        Rational q(mpz_class(num, 10), d);
        q.canonicalize();
        return q;
    }
    if (auto dot = text.find('.'); dot != std::string::npos) {
        std::string whole = text.substr(0, dot);
        std::string frac = text.substr(dot + 1);
        if (!all_digits(whole) || !all_digits(frac) || frac.size() > 18) return std::nullopt;
        mpz_class scaled(whole + frac, 10);
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
        Rational q(scaled, den);
        q.canonicalize();
        return q;
    }
    if (!all_digits(text)) return std::nullopt;
    return Rational(mpz_class(text, 10));
}

std::string rational_to_string(const Rational& q) {
    Rational c = q;  // callers may hand over a value built without canonicalize()
    c.canonicalize();
    if (c.get_den() == 1) return c.get_num().get_str();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

double rational_to_double(const Rational& q) {
    const mpz_class& num = q.get_num();
    const mpz_class& den = q.get_den();
    // Division of two exactly representable integers rounds correctly; mpq_get_d
    // truncates, so only fall back to it when 53 bits are not enough.
    if (mpz_sizeinbase(num.get_mpz_t(), 2) <= 53 && mpz_sizeinbase(den.get_mpz_t(), 2) <= 53)
        return num.get_d() / den.get_d();
    return q.get_d();
}

Rational rational_from_double(double x) {
    Rational q;
    mpq_set_d(q.get_mpq_t(), x);  // exact: binary64 values are dyadic rationals
    return q;
}

}  // namespace sg
