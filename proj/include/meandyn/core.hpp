#pragma once

// Shared scalar types and error hierarchy.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace meandyn {

/// Exact rational used for densities, weights, defects and metric values.
using Rational = mpq_class;

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Operands belong to different groups or spaces.
class DescriptorMismatch : public Error
{
public:
    using Error::Error;
};

/// Integer coordinate left the int64 range.
class OverflowError : public Error
{
public:
    using Error::Error;
};

/// An enumeration or solver would exceed its configured resource limit.
class BudgetError : public Error
{
public:
    using Error::Error;
};

/// Input outside the domain of a definition (e.g. a diagonal pair for S_wsm).
class DomainError : public Error
{
public:
    using Error::Error;
};

class ParseError : public Error
{
public:
    using Error::Error;
};

inline std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw OverflowError("integer coordinate overflow in " + std::to_string(a) + " + " + std::to_string(b));
    return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r))
        throw OverflowError("integer coordinate overflow in " + std::to_string(a) + " - " + std::to_string(b));
    return r;
}

inline std::int64_t checked_neg(std::int64_t a)
{
    return checked_sub(0, a);
}

inline Rational make_rational(std::int64_t num, std::int64_t den = 1)
{
    Rational q(static_cast<long>(num), static_cast<long>(den));
    q.canonicalize();
    return q;
}

/// "p/q" in lowest terms, or "p" for integers.
inline std::string fraction_string(const Rational& q)
{
    return q.get_str();
}

/// Correctly rounded when numerator and denominator fit in a double;
/// mpq's own conversion truncates.
inline double to_double(const Rational& q)
{
    const auto& num = q.get_num();
    const auto& den = q.get_den();
    if (mpz_sizeinbase(num.get_mpz_t(), 2) <= 53 && mpz_sizeinbase(den.get_mpz_t(), 2) <= 53)
        return num.get_d() / den.get_d();
    return q.get_d();
}

inline Rational parse_fraction(const std::string& text)
{
    try {
        Rational q(text);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw ParseError("not a fraction: '" + text + "'");
    }
}

} // namespace meandyn
