#ifndef COARSEKIT_RATIONAL_HPP
#define COARSEKIT_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

#include "coarsekit/errors.hpp"

namespace coarsekit {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline std::string to_string(const Rational& q) {
    const BigInt num = boost::multiprecision::numerator(q);
    const BigInt den = boost::multiprecision::denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

// Accepts "n", "-n", "p/q", and plain decimal strings like "2.5".
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw InvalidInput("empty rational literal");
    const auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            BigInt num(text.substr(0, slash));
            BigInt den(text.substr(slash + 1));
            if (den == 0) throw InvalidInput("zero denominator in '" + text + "'");
            return Rational(num, den);
        }
        const auto dot = text.find('.');
        if (dot != std::string::npos) {
            std::string digits = text.substr(0, dot) + text.substr(dot + 1);
            BigInt num(digits);
            BigInt den = 1;
            for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
            return Rational(num, den);
        }
        return Rational(BigInt(text));
    } catch (const std::exception&) {
        throw InvalidInput("cannot parse rational '" + text + "'");
    }
}

}  // namespace coarsekit

#endif
