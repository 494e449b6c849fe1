#ifndef DMRKIT_RATIONAL_HPP
#define DMRKIT_RATIONAL_HPP

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dmrkit {

// Exact rational number, always in lowest terms with positive denominator.
// Thin value wrapper around GMP's mpq_class; nothing outside this header
// should need GMP directly.
class Rat {
	mpq_class v;

	explicit Rat(mpq_class q) : v(std::move(q)) { v.canonicalize(); }

public:
	Rat() : v(0) {}
	Rat(long n) : v(n) {}
	Rat(long num, long den) : v(num, den)
	{
		if (den == 0)
			throw std::invalid_argument("Rat: zero denominator");
		v.canonicalize();
	}
	Rat(const mpz_class& num, const mpz_class& den) : v(num, den)
	{
		if (den == 0)
			throw std::invalid_argument("Rat: zero denominator");
		v.canonicalize();
	}

	// Accepts "a", "a/b", and decimal "a.b" (any sign). Returns nothing on
	// malformed input; parse() throws instead.
	static std::optional<Rat> try_parse(std::string_view s);
	static Rat parse(std::string_view s)
	{
		auto r = try_parse(s);
		if (!r)
			throw std::invalid_argument("Rat: cannot parse '" + std::string(s) + "'");
		return *r;
	}

	const mpz_class& num() const { return v.get_num(); }
	const mpz_class& den() const { return v.get_den(); }

	bool is_zero() const { return sgn(v) == 0; }
	bool is_integer() const { return v.get_den() == 1; }
	int sign() const { return sgn(v); }
	double to_double() const { return v.get_d(); }

	// "a" for integers, "a/b" otherwise.
	std::string str() const
	{
		if (is_integer())
			return v.get_num().get_str();
		return v.get_num().get_str() + "/" + v.get_den().get_str();
	}

	// Largest integer k with k*b <= a; requires b > 0. Used to count whole
	// supply periods inside an interval.
	static mpz_class floor_div(const Rat& a, const Rat& b)
	{
		if (b.sign() <= 0)
			throw std::invalid_argument("Rat::floor_div: divisor must be positive");
		mpz_class q;
		mpz_class n = a.num() * b.den();
		mpz_class d = a.den() * b.num();
		mpz_fdiv_q(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
		return q;
	}

	friend Rat operator+(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v + b.v)); }
	friend Rat operator-(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v - b.v)); }
	friend Rat operator*(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v * b.v)); }
	friend Rat operator/(const Rat& a, const Rat& b)
	{
		if (b.is_zero())
			throw std::invalid_argument("Rat: division by zero");
		return Rat(mpq_class(a.v / b.v));
	}
	friend Rat operator-(const Rat& a) { return Rat(mpq_class(-a.v)); }

	Rat& operator+=(const Rat& o) { v += o.v; return *this; }
	Rat& operator-=(const Rat& o) { v -= o.v; return *this; }
	Rat& operator*=(const Rat& o) { v *= o.v; return *this; }
	Rat& operator/=(const Rat& o) { *this = *this / o; return *this; }

	friend bool operator==(const Rat& a, const Rat& b) { return a.v == b.v; }
	friend std::strong_ordering operator<=>(const Rat& a, const Rat& b)
	{
		int c = cmp(a.v, b.v);
		return c < 0 ? std::strong_ordering::less
		     : c > 0 ? std::strong_ordering::greater
		             : std::strong_ordering::equal;
	}
};

inline Rat min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }
inline Rat abs(const Rat& a) { return a.sign() < 0 ? -a : a; }

inline std::ostream& operator<<(std::ostream& os, const Rat& r)
{
	return os << r.str();
}

inline std::optional<Rat> Rat::try_parse(std::string_view s)
{
	if (s.empty())
		return std::nullopt;
	bool neg = false;
	size_t i = 0;
	if (s[0] == '+' || s[0] == '-') {
		neg = (s[0] == '-');
		i = 1;
	}
	auto digits = [&](size_t from, size_t to) {
		if (from >= to)
			return false;
		for (size_t k = from; k < to; k++)
			if (s[k] < '0' || s[k] > '9')
				return false;
		return true;
	};
	size_t slash = s.find('/', i);
	size_t dot = s.find('.', i);
	mpz_class num, den;
	if (slash != std::string_view::npos) {
		if (dot != std::string_view::npos)
			return std::nullopt;
		if (!digits(i, slash) || !digits(slash + 1, s.size()))
			return std::nullopt;
		// base 10 always: the default base 0 would read leading zeros as octal
		num = mpz_class(std::string(s.substr(i, slash - i)), 10);
		den = mpz_class(std::string(s.substr(slash + 1)), 10);
		if (den == 0)
			return std::nullopt;
	} else if (dot != std::string_view::npos) {
		if (!digits(i, dot) || !digits(dot + 1, s.size()))
			return std::nullopt;
		std::string whole(s.substr(i, dot - i));
		std::string frac(s.substr(dot + 1));
		num = mpz_class(whole + frac, 10);
		den = 1;
		for (size_t k = 0; k < frac.size(); k++)
			den *= 10;
	} else {
		if (!digits(i, s.size()))
			return std::nullopt;
		num = mpz_class(std::string(s.substr(i)), 10);
		den = 1;
	}
	if (neg)
		num = -num;
	return Rat(num, den);
}

} // namespace dmrkit

#endif
