#pragma once

// Coefficient fields for linear algebra over Q or a prime field F_p.

#include <cstdint>
#include <string>
#include <utility>

#include "toricqh/errors.hpp"
#include "toricqh/exactmath.hpp"

namespace toricqh {

struct RationalField {
  using Elem = Rational;

  Elem zero() const { return Rational(0); }
  Elem one() const { return Rational(1); }
  Elem from(const Rational& q) const { return q; }
  Elem from_int(long v) const { return Rational(v); }
  Rational to_rational(const Elem& a) const { return a; }

  bool is_zero(const Elem& a) const { return sgn(a) == 0; }
  Elem add(const Elem& a, const Elem& b) const { return a + b; }
  Elem sub(const Elem& a, const Elem& b) const { return a - b; }
  Elem mul(const Elem& a, const Elem& b) const { return a * b; }
  Elem neg(const Elem& a) const { return -a; }
  Elem inv(const Elem& a) const { return 1 / a; }

  std::string name() const { return "Q"; }
};

struct PrimeField {
  using Elem = std::uint64_t;
  std::uint64_t p;

  Elem zero() const { return 0; }
  Elem one() const { return 1 % p; }

  Elem from_int(long v) const {
    long r = v % static_cast<long>(p);
    return static_cast<Elem>(r < 0 ? r + static_cast<long>(p) : r);
  }

  Elem from(const Rational& q) const {
    Integer pz(static_cast<unsigned long>(p));
    Integer num = q.get_num() % pz;
    Integer den = q.get_den() % pz;
    if (den == 0) {
      throw PreconditionError("coefficient " + to_string(q) + " is not defined in F_" +
                              std::to_string(p));
    }
    if (num < 0) num += pz;
    return mul(static_cast<Elem>(num.get_ui()), inv(static_cast<Elem>(den.get_ui())));
  }

  Rational to_rational(const Elem& a) const { return Rational(static_cast<unsigned long>(a)); }

  bool is_zero(const Elem& a) const { return a == 0; }
  Elem add(Elem a, Elem b) const {
    Elem s = a + b;
    return s >= p ? s - p : s;
  }
  Elem sub(Elem a, Elem b) const { return a >= b ? a - b : a + p - b; }
  Elem mul(Elem a, Elem b) const {
    return static_cast<Elem>((static_cast<unsigned __int128>(a) * b) % p);
  }
  Elem neg(Elem a) const { return a == 0 ? 0 : p - a; }
  Elem inv(Elem a) const {
    if (a == 0) throw Error("division by zero in F_" + std::to_string(p));
    Elem result = 1;
    Elem base = a;
    std::uint64_t e = p - 2;
    while (e) {
      if (e & 1) result = mul(result, base);
      base = mul(base, base);
      e >>= 1;
    }
    return result;
  }

  std::string name() const { return "F_" + std::to_string(p); }
};

/// Selects Q (prime == 0) or F_prime.
struct FieldSpec {
  std::uint64_t prime = 0;

  static FieldSpec rationals() { return {}; }
  static FieldSpec prime_field(std::uint64_t p);

  bool is_rational() const { return prime == 0; }
  std::string name() const { return prime == 0 ? "Q" : "F_" + std::to_string(prime); }
  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

inline FieldSpec FieldSpec::prime_field(std::uint64_t p) {
  if (p < 2 || p >= (1ULL << 62) || mpz_probab_prime_p(Integer(static_cast<unsigned long>(p)).get_mpz_t(), 30) == 0) {
    throw PreconditionError("field characteristic " + std::to_string(p) + " is not a prime");
  }
  FieldSpec f;
  f.prime = p;
  return f;
}

template <class Fn>
decltype(auto) with_field(const FieldSpec& spec, Fn&& fn) {
  if (spec.is_rational()) return std::forward<Fn>(fn)(RationalField{});
  return std::forward<Fn>(fn)(PrimeField{spec.prime});
}

}  // namespace toricqh
