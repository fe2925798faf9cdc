#include "finact/rational.hpp"

#include <cctype>

namespace finact {

Rat rat_parse(const std::string& text) {
    if (text.empty()) throw ParseError("empty rational literal");
    std::size_t pos = 0;
    if (text[0] == '-' || text[0] == '+') pos = 1;
    if (pos >= text.size()) throw ParseError("malformed rational literal '" + text + "'");
    bool seen_slash = false;
    for (std::size_t i = pos; i < text.size(); ++i) {
        if (text[i] == '/') {
            if (seen_slash || i + 1 == text.size() || i == pos)
                throw ParseError("malformed rational literal '" + text + "'");
            seen_slash = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(text[i])))
            throw ParseError("malformed rational literal '" + text + "'");
    }
    Rat r;
    if (r.set_str(text, 10) != 0) throw ParseError("malformed rational literal '" + text + "'");
    if (r.get_den() == 0) throw ParseError("zero denominator in '" + text + "'");
    r.canonicalize();
    return r;
}

std::string rat_str(const Rat& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

double rat_approx(const Rat& r) { return r.get_d(); }

Rat rat_gcd(const Rat& a, const Rat& b) {
    if (a <= 0 || b <= 0) throw PreconditionError("gcd of non-positive rationals");
    mpz_class num, den;
    mpz_gcd(num.get_mpz_t(), a.get_num().get_mpz_t(), b.get_num().get_mpz_t());
    mpz_lcm(den.get_mpz_t(), a.get_den().get_mpz_t(), b.get_den().get_mpz_t());
    Rat r(num, den);
    r.canonicalize();
    return r;
}

} // namespace finact
