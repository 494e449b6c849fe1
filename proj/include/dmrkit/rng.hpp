#ifndef DMRKIT_RNG_HPP
#define DMRKIT_RNG_HPP

#include <cstdint>

namespace dmrkit {

// splitmix64 (Steele, Lea, Flood; public-domain reference constants). Used
// only to expand a user seed into generator state, per the xoshiro authors'
// recommendation.
struct SplitMix64 {
	uint64_t x;

	explicit SplitMix64(uint64_t seed) : x(seed) {}

	uint64_t next()
	{
		x += 0x9E3779B97F4A7C15ull;
		uint64_t z = x;
		z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
		z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
		return z ^ (z >> 31);
	}
};

// xoshiro256** 1.0 (Blackman & Vigna; public-domain reference algorithm).
// Chosen for the simulator because it is fast, tiny, well studied, and has a
// documented jump function giving 2^128-step separated substreams, which is
// how Monte Carlo replications get independent, reproducible streams. The
// generator identity matters: reports list the seed, and re-running with the
// same seed must reproduce them exactly.
class Xoshiro256ss {
	uint64_t s[4];

	static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

public:
	// stream r = seed-derived state advanced by r jumps (2^128 steps each).
	explicit Xoshiro256ss(uint64_t seed, uint64_t stream = 0)
	{
		SplitMix64 sm(seed);
		for (auto& w : s)
			w = sm.next();
		for (uint64_t i = 0; i < stream; i++)
			jump();
	}

	uint64_t next()
	{
		const uint64_t result = rotl(s[1] * 5, 7) * 9;
		const uint64_t t = s[1] << 17;
		s[2] ^= s[0];
		s[3] ^= s[1];
		s[1] ^= s[2];
		s[0] ^= s[3];
		s[2] ^= t;
		s[3] = rotl(s[3], 45);
		return result;
	}

	// Advance 2^128 steps (reference jump polynomial).
	void jump()
	{
		static const uint64_t JUMP[] = {0x180ec6d33cfd0abaull, 0xd5a61266f0c9392cull,
		                                0xa9582618e03fc9aaull, 0x39abdc4529b1661cull};
		uint64_t t[4] = {0, 0, 0, 0};
		for (uint64_t jump_word : JUMP)
			for (int b = 0; b < 64; b++) {
				if (jump_word & (uint64_t(1) << b))
					for (int w = 0; w < 4; w++)
						t[w] ^= s[w];
				next();
			}
		for (int w = 0; w < 4; w++)
			s[w] = t[w];
	}

	// Unbiased uniform draw in [0, n), n >= 1, by rejection.
	uint64_t below(uint64_t n)
	{
		if (n <= 1)
			return 0;
		const uint64_t limit = n * (~uint64_t(0) / n);
		uint64_t r = next();
		while (r >= limit)
			r = next();
		return r % n;
	}
};

} // namespace dmrkit

#endif
