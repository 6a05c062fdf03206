"""Independent re-implementation of the random 3-CNF stream.

MT19937-64 from its published recurrence, SplitMix64 seeding, rejection
sampling for variables, top three bits for signs. Prints the literals the
C++ generator must produce for (n=10, c=0.3, seed=42).
"""

MASK = (1 << 64) - 1


def mix64(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


class MT64:
    N, M = 312, 156
    A = 0xB5026F5AA96619E9
    UPPER, LOWER = 0xFFFFFFFF80000000, 0x7FFFFFFF

    def __init__(self, seed):
        self.mt = [seed & MASK]
        for i in range(1, self.N):
            prev = self.mt[-1]
            self.mt.append((6364136223846793005 * (prev ^ (prev >> 62)) + i) & MASK)
        self.idx = self.N

    def twist(self):
        mt = self.mt
        for i in range(self.N):
            x = (mt[i] & self.UPPER) | (mt[(i + 1) % self.N] & self.LOWER)
            xa = x >> 1
            if x & 1:
                xa ^= self.A
            mt[i] = mt[(i + self.M) % self.N] ^ xa
        self.idx = 0

    def __call__(self):
        if self.idx >= self.N:
            self.twist()
        y = self.mt[self.idx]
        self.idx += 1
        y ^= (y >> 29) & 0x5555555555555555
        y ^= (y << 17) & 0x71D67FFFEDA60000
        y ^= (y << 37) & 0xFFF7EEE000000000
        y ^= y >> 43
        return y & MASK


def uniform_below(rng, bound):
    threshold = ((1 << 64) - bound) % bound
    while True:
        r = rng()
        if r >= threshold:
            return r % bound


def generate(n, c, seed):
    rng = MT64(mix64(seed))
    m = int(c * n + 0.5)
    out = []
    for _ in range(m):
        v0 = uniform_below(rng, n) + 1
        v1 = v0
        while v1 == v0:
            v1 = uniform_below(rng, n) + 1
        v2 = v0
        while v2 in (v0, v1):
            v2 = uniform_below(rng, n) + 1
        s = rng()
        for v, bit in ((v0, 63), (v1, 62), (v2, 61)):
            out.append(-v if (s >> bit) & 1 else v)
    return out


if __name__ == "__main__":
    # Sanity: the standard's required 10000th output for default seed 5489.
    r = MT64(5489)
    for _ in range(9999):
        r()
    assert r() == 9981545732273789042
    print(generate(10, 0.3, 42))
