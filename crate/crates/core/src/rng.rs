//! Seeded, splittable random number generation.
//!
//! Everything stochastic in this crate (graph generation, walks, observation
//! noise, Monte Carlo trials) draws from [`SeededRng`], a splitmix64-seeded
//! xoshiro256++ stream. The generator is implemented here rather than pulled
//! from a crate so that a given seed reproduces the same byte stream across
//! builds: graph serialization and observation regeneration are asserted to be
//! bit-identical under a fixed seed.

/// xoshiro256++ state plus a cached Box-Muller spare.
#[derive(Clone, Debug)]
pub struct SeededRng {
    state: [u64; 4],
    spare_gaussian: Option<f64>,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        let mut s = seed;
        let state = [
            splitmix64(&mut s),
            splitmix64(&mut s),
            splitmix64(&mut s),
            splitmix64(&mut s),
        ];
        SeededRng {
            state,
            spare_gaussian: None,
        }
    }

    /// Independent stream derived from a master seed and a stream index.
    ///
    /// Used to give each trial of an experiment its own noise stream while
    /// keeping the whole campaign reproducible from one seed.
    pub fn stream(master: u64, index: u64) -> Self {
        let mut s = master ^ index.wrapping_mul(0xA24B_AED4_963E_E407);
        let mixed = splitmix64(&mut s);
        SeededRng::new(mixed)
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)` with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)` without modulo bias (Lemire widening).
    pub fn next_index(&mut self, n: u32) -> u32 {
        debug_assert!(n > 0);
        let n64 = u64::from(n);
        let mut m = u128::from(self.next_u64()) * u128::from(n64);
        let mut low = m as u64;
        if low < n64 {
            let threshold = n64.wrapping_neg() % n64;
            while low < threshold {
                m = u128::from(self.next_u64()) * u128::from(n64);
                low = m as u64;
            }
        }
        (m >> 64) as u32
    }

    /// Standard normal draw (Box-Muller, one spare cached per pair).
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare_gaussian.take() {
            return z;
        }
        // 1 - u keeps the argument of ln strictly positive.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare_gaussian = Some(r * angle.sin());
        r * angle.cos()
    }

    /// Poisson draw by chunked inversion; chunking keeps the running product
    /// above the subnormal range for means in the tens of thousands.
    pub fn next_poisson(&mut self, lambda: f64) -> u64 {
        debug_assert!(lambda > 0.0);
        let mut remaining = lambda;
        let mut total = 0u64;
        while remaining > 0.0 {
            let chunk = remaining.min(500.0);
            remaining -= chunk;
            let limit = (-chunk).exp();
            let mut p = 1.0;
            let mut k = 0u64;
            loop {
                k += 1;
                p *= self.next_f64();
                if p <= limit {
                    break;
                }
            }
            total += k - 1;
        }
        total
    }
}
