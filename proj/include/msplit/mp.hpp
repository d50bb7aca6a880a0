#pragma once

#include <gmpxx.h>

namespace msplit {

// gmpxx only converses in `long`; we carry 64-bit values as `long long`.
static_assert(sizeof(long) == sizeof(long long), "LP64 platform expected");

inline mpz_class to_mpz(long long v) { return mpz_class(static_cast<long>(v)); }

inline long long to_ll(const mpz_class& z) { return static_cast<long long>(z.get_si()); }

}  // namespace msplit
