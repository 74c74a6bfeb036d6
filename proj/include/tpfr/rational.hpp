#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace tpfr {

/// "num/den" in lowest terms, or "num" when the denominator is 1.
std::string format_rational(const mpq_class& q);

/// Accepts "num/den" or an integer. Throws tpfr::Error on malformed input
/// or a zero denominator.
mpq_class parse_rational(std::string_view text);

/// log(a / b) for positive integers of any size.
double log_ratio(const mpz_class& a, const mpz_class& b);

/// a / b as a double for positive integers of any size.
double ratio(const mpz_class& a, const mpz_class& b);

}  // namespace tpfr
