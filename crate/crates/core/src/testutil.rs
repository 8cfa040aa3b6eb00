//! Support code for the test suites: a deterministic RNG, a software
//! double-double (~32 significant digits) re-evaluation of the closed-form
//! kernels, and small special-function oracles (generic ₂F₁ series, AGM).
//!
//! Nothing here is used by any production path; test oracles must not share
//! rounding with the code they check.

/// SplitMix64. Deterministic across platforms, good enough for sampling test
/// points.
#[derive(Clone)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform integer in [lo, hi].
    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_u64() % ((hi - lo + 1) as u64)) as i64
    }
}

// ---------------------------------------------------------------------------
// Double-double arithmetic ("Dd"), after Dekker/Knuth. Roughly 32 significant
// digits. Only the operations the kernel oracles need.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

#[allow(clippy::should_implement_trait)]
impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let e = e + self.lo + rhs.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn sub(self, rhs: Dd) -> Dd {
        self.add(rhs.neg())
    }

    pub fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self.sub(rhs.mul(Dd::from(q1)));
        let q2 = r.hi / rhs.hi;
        let r2 = r.sub(rhs.mul(Dd::from(q2)));
        let q3 = r2.hi / rhs.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from(q3))
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        // One Newton step on a f64 seed doubles the digits.
        let x = 1.0 / self.hi.sqrt();
        let ax = Dd::from(self.hi.sqrt());
        let err = self.sub(ax.mul(ax));
        ax.add(Dd::from(err.hi * (x * 0.5)))
    }

    pub fn powi(self, n: u32) -> Dd {
        let mut acc = Dd::ONE;
        let mut base = self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            k >>= 1;
        }
        acc
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }

    pub fn scale(self, s: f64) -> Dd {
        self.mul(Dd::from(s))
    }

    /// Taylor sine, valid for |x| ≲ 4 (all our arguments are in [−π, π]).
    pub fn sin(self) -> Dd {
        let x2 = self.mul(self);
        let mut term = self;
        let mut sum = self;
        let mut k = 1u32;
        loop {
            let denom = ((2 * k) * (2 * k + 1)) as f64;
            term = term.mul(x2).div(Dd::from(denom)).neg();
            sum = sum.add(term);
            if term.hi.abs() < 1e-35 {
                break;
            }
            k += 1;
        }
        sum
    }

    /// Taylor cosine, same range as [`Dd::sin`].
    pub fn cos(self) -> Dd {
        let x2 = self.mul(self);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        let mut k = 1u32;
        loop {
            let denom = ((2 * k - 1) * (2 * k)) as f64;
            term = term.mul(x2).div(Dd::from(denom)).neg();
            sum = sum.add(term);
            if term.hi.abs() < 1e-35 {
                break;
            }
            k += 1;
        }
        sum
    }
}

// ---------------------------------------------------------------------------
// Extended-precision mirrors of the closed-form kernels. These restate the
// formulas from scratch in Dd arithmetic; they share no code with the
// production f64 paths.
// ---------------------------------------------------------------------------

pub fn dd_gap_sq(t: f64, u: f64, v: f64) -> Dd {
    let (t, u, v) = (Dd::from(t), Dd::from(u), Dd::from(v));
    let a = v.cos().sub(t.cos().mul(u.cos()));
    let b = v.sin().sub(t.sin().mul(u.sin()));
    a.mul(a).add(b.mul(b))
}

/// k(t, u, v) = g(t, u, v)^{−1/2} in double-double.
pub fn dd_layer_kernel(t: f64, u: f64, v: f64) -> Dd {
    Dd::ONE.div(dd_gap_sq(t, u, v).sqrt())
}

/// ∂k/∂t in double-double.
pub fn dd_layer_kernel_dt(t: f64, u: f64, v: f64) -> Dd {
    let g = dd_gap_sq(t, u, v);
    let (td, ud, vd) = (Dd::from(t), Dd::from(u), Dd::from(v));
    let a = vd.cos().sub(td.cos().mul(ud.cos()));
    let b = vd.sin().sub(td.sin().mul(ud.sin()));
    let numer = a
        .mul(td.sin())
        .mul(ud.cos())
        .sub(b.mul(td.cos()).mul(ud.sin()));
    numer.neg().div(g.sqrt().powi(3))
}

/// K(u, v) = sin u sin v / g(0, u, v)^{3/2} in double-double.
pub fn dd_neumann_kernel(u: f64, v: f64) -> Dd {
    let (ud, vd) = (Dd::from(u), Dd::from(v));
    ud.sin()
        .mul(vd.sin())
        .div(dd_gap_sq(0.0, u, v).sqrt().powi(3))
}

/// K_t(u, v), interior-gradient kernel, in double-double. Returns (re, im).
pub fn dd_gradient_kernel(t: f64, u: f64, v: f64) -> (Dd, Dd) {
    let (td, ud, vd) = (Dd::from(t), Dd::from(u), Dd::from(v));
    let re_br = vd.cos().sub(td.cos().mul(ud.cos()));
    let im_br = vd.sin().neg();
    let gp = dd_gap_sq(t, u, v).sqrt().powi(3);
    let gm = dd_gap_sq(-t, u, v).sqrt().powi(3);
    let weight = Dd::ONE.div(gp).add(Dd::ONE.div(gm));
    let s = ud.sin().mul(weight);
    (s.mul(re_br), s.mul(im_br))
}

// ---------------------------------------------------------------------------
// Small special-function oracles.
// ---------------------------------------------------------------------------

/// Γ(1/4), for the closed-form constants that involve Γ(−1/4)² = 16 Γ(1/4)²·...
/// (reflection gives Γ(−1/4) = −4 Γ(3/4) and Γ(3/4) = π√2 / Γ(1/4)).
pub const GAMMA_QUARTER: f64 = 3.625_609_908_221_908;

/// Plain Gauss series for ₂F₁(a, b; c; z), |z| < 1.
pub fn gauss_2f1_series(a: f64, b: f64, c: f64, z: f64) -> f64 {
    assert!(z.abs() < 1.0);
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..10_000 {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1.0) {
            return sum;
        }
    }
    sum
}

/// ₂F₁ for z < 0 via the Pfaff transformation
/// ₂F₁(a,b;c;z) = (1−z)^{−a} ₂F₁(a, c−b; c; z/(z−1)).
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> f64 {
    if z < 0.0 {
        (1.0 - z).powf(-a) * gauss_2f1_series(a, c - b, c, z / (z - 1.0))
    } else {
        gauss_2f1_series(a, b, c, z)
    }
}

/// Arithmetic-geometric mean.
pub fn agm(a0: f64, b0: f64) -> f64 {
    let (mut a, mut b) = (a0, b0);
    for _ in 0..60 {
        let (an, bn) = (0.5 * (a + b), (a * b).sqrt());
        if (an - bn).abs() <= 1e-17 * an.abs() {
            return an;
        }
        a = an;
        b = bn;
    }
    a
}

/// ₂F₁(½, ½; 1; x) through the complete elliptic integral:
/// (2/π) K(√x) = 1 / AGM(1, √(1−x)).
pub fn f21_half_agm(x: f64) -> f64 {
    assert!((0.0..1.0).contains(&x));
    1.0 / agm(1.0, (1.0 - x).sqrt())
}
