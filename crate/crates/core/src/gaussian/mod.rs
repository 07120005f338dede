//! Exact Gaussian-integer arithmetic and the hourglass machinery built on it:
//! the χ map to three-square progressions, the congruum parametrization, the
//! fourth-power identity that makes both hourglass rows close, and searches.

mod factor;
mod hourglass;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use factor::{gaussian_factor, GaussianFactorization};
pub use hourglass::{
    hourglass_from_generators, hourglass_guess, hourglass_guesses, search_hourglass,
    search_hourglass_with_progress, two_square_reps, HourglassCandidate, HourglassGuess,
    HourglassHit, HourglassSearch, SearchMode,
};

/// `re + im·i` with arbitrary-precision parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussianInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        GaussianInt {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn zero() -> Self {
        GaussianInt::new(0, 0)
    }

    pub fn one() -> Self {
        GaussianInt::new(1, 0)
    }

    pub fn i() -> Self {
        GaussianInt::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    pub fn conj(&self) -> Self {
        GaussianInt {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// `ω·ω̄ = re² + im²`.
    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = GaussianInt::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = base.square();
            exp >>= 1;
        }
        acc
    }

    /// `self · iᵏ`.
    pub fn times_i_pow(&self, k: u32) -> Self {
        match k % 4 {
            0 => self.clone(),
            1 => GaussianInt::new(-&self.im, self.re.clone()),
            2 => -self,
            _ => GaussianInt::new(self.im.clone(), -&self.re),
        }
    }

    /// The associate with `re > 0, im ≥ 0`, and the `k` with `self = canonical · iᵏ`.
    pub fn canonical_associate(&self) -> (Self, u32) {
        if self.is_zero() {
            return (self.clone(), 0);
        }
        for k in 0..4 {
            let candidate = self.times_i_pow(k);
            if candidate.re.is_positive() && !candidate.im.is_negative() {
                return (candidate, (4 - k) % 4);
            }
        }
        unreachable!("every nonzero Gaussian integer has a first-quadrant associate")
    }

    pub fn canonical(&self) -> Self {
        self.canonical_associate().0
    }

    /// Exact quotient `self / d`, if `d` divides `self`.
    pub fn div_exact(&self, d: &GaussianInt) -> Option<Self> {
        let n = d.norm();
        if n.is_zero() {
            return None;
        }
        let num = self * &d.conj();
        if (&num.re % &n).is_zero() && (&num.im % &n).is_zero() {
            Some(GaussianInt {
                re: num.re / &n,
                im: num.im / n,
            })
        } else {
            None
        }
    }

    /// `(re, im)` as small integers, if they fit.
    pub fn to_i128_pair(&self) -> Option<(i128, i128)> {
        use num_traits::ToPrimitive;
        Some((self.re.to_i128()?, self.im.to_i128()?))
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -&self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Add for &GaussianInt {
    type Output = GaussianInt;
    fn add(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &GaussianInt {
    type Output = GaussianInt;
    fn sub(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &GaussianInt {
    type Output = GaussianInt;
    fn mul(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for GaussianInt {
            type Output = GaussianInt;
            fn $m(self, rhs: GaussianInt) -> GaussianInt {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

/// A three-square arithmetic progression `r², s², t²` (so `r² + t² = 2s²`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChiTriple {
    pub r: BigInt,
    pub s: BigInt,
    pub t: BigInt,
}

/// `χ(ω) = (Re ω² + Im ω², ω·ω̄, Re ω² − Im ω²)`.
pub fn chi(w: &GaussianInt) -> ChiTriple {
    let sq = w.square();
    ChiTriple {
        r: &sq.re + &sq.im,
        s: w.norm(),
        t: &sq.re - &sq.im,
    }
}

/// The progression `r = k(m²+2mn−n²)`, `s = k(m²+n²)`, `t = k(m²−2mn−n²)`
/// with common difference `r² − s² = 4mn(m+n)(m−n)k²`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CongruumTriple {
    pub r: BigInt,
    pub s: BigInt,
    pub t: BigInt,
    pub m: BigInt,
    pub n: BigInt,
    pub k: BigInt,
    pub congruum: BigInt,
}

pub fn congruum_triple(
    m: impl Into<BigInt>,
    n: impl Into<BigInt>,
    k: impl Into<BigInt>,
) -> CongruumTriple {
    let (m, n, k) = (m.into(), n.into(), k.into());
    let (m2, n2, mn2) = (&m * &m, &n * &n, BigInt::from(2) * &m * &n);
    let r = &k * (&m2 + &mn2 - &n2);
    let s = &k * (&m2 + &n2);
    let t = &k * (&m2 - &mn2 - &n2);
    let congruum = BigInt::from(4) * &m * &n * (&m + &n) * (&m - &n) * &k * &k;
    CongruumTriple {
        r,
        s,
        t,
        m,
        n,
        k,
        congruum,
    }
}

/// `(Re ω⁴, Im ω⁴)`.
pub fn pow4_parts(w: &GaussianInt) -> (BigInt, BigInt) {
    let p = w.square().square();
    (p.re, p.im)
}

/// Which of the three inputs a degeneracy refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    X,
    Y,
    Z,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Slot::X => "x",
            Slot::Y => "y",
            Slot::Z => "z",
        })
    }
}

/// Why a triple is excluded before (or regardless of) the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Degeneracy {
    /// The fourth power of this input is a rational integer.
    FourthPowerReal(Slot),
    /// These two fourth powers are real multiples of each other.
    RealMultiples(Slot, Slot),
}

impl fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degeneracy::FourthPowerReal(s) => write!(f, "{s}⁴ real"),
            Degeneracy::RealMultiples(a, b) => write!(f, "{a}⁴ and {b}⁴ are real multiples"),
        }
    }
}

/// Result of testing `Im[x⁴y⁴z⁴] = −4·Im[x⁴]·Im[y⁴]·Im[z⁴]` with its side conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct T41Check {
    pub identity_holds: bool,
    /// First failing side condition, realness checked before real multiples.
    pub degeneracy: Option<Degeneracy>,
}

impl T41Check {
    pub fn holds(&self) -> bool {
        self.identity_holds && self.degeneracy.is_none()
    }
}

fn degeneracy_of<T: PartialEq + Zero>(
    fourth: [(T, T); 3],
    mut cross: impl FnMut(&(T, T), &(T, T)) -> bool,
) -> Option<Degeneracy> {
    const SLOTS: [Slot; 3] = [Slot::X, Slot::Y, Slot::Z];
    for (k, f) in fourth.iter().enumerate() {
        if f.1.is_zero() {
            return Some(Degeneracy::FourthPowerReal(SLOTS[k]));
        }
    }
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        if cross(&fourth[a], &fourth[b]) {
            return Some(Degeneracy::RealMultiples(SLOTS[a], SLOTS[b]));
        }
    }
    None
}

/// Arbitrary-precision form of the fourth-power criterion.
pub fn t41_holds(x: &GaussianInt, y: &GaussianInt, z: &GaussianInt) -> T41Check {
    let fx = x.square().square();
    let fy = y.square().square();
    let fz = z.square().square();
    let lhs = (&(&fx * &fy) * &fz).im;
    let rhs = BigInt::from(-4) * &fx.im * &fy.im * &fz.im;
    let degeneracy = degeneracy_of([(fx.re, fx.im), (fy.re, fy.im), (fz.re, fz.im)], |u, v| {
        &u.0 * &v.1 == &u.1 * &v.0
    });
    T41Check {
        identity_holds: lhs == rhs,
        degeneracy,
    }
}

/// Same test on precomputed fourth powers in `i128`; `None` on overflow.
pub(crate) fn t41_holds_fourth_i128(
    fx: (i128, i128),
    fy: (i128, i128),
    fz: (i128, i128),
) -> Option<T41Check> {
    let cmul = |a: (i128, i128), b: (i128, i128)| -> Option<(i128, i128)> {
        Some((
            a.0.checked_mul(b.0)?.checked_sub(a.1.checked_mul(b.1)?)?,
            a.0.checked_mul(b.1)?.checked_add(a.1.checked_mul(b.0)?)?,
        ))
    };
    let xy = cmul(fx, fy)?;
    let lhs =
        xy.0.checked_mul(fz.1)?
            .checked_add(xy.1.checked_mul(fz.0)?)?;
    let rhs = (-4i128)
        .checked_mul(fx.1)?
        .checked_mul(fy.1)?
        .checked_mul(fz.1)?;
    let mut overflow = false;
    let degeneracy = degeneracy_of([fx, fy, fz], |u, v| {
        match (u.0.checked_mul(v.1), u.1.checked_mul(v.0)) {
            (Some(a), Some(b)) => a == b,
            _ => {
                overflow = true;
                false
            }
        }
    });
    (!overflow).then_some(T41Check {
        identity_holds: lhs == rhs,
        degeneracy,
    })
}

/// `(α, β, γ) = (x̄yz, xȳz, xyz̄)`, all of norm `N(x)N(y)N(z)`.
pub fn t41_construct(x: &GaussianInt, y: &GaussianInt, z: &GaussianInt) -> [GaussianInt; 3] {
    [
        &(&x.conj() * y) * z,
        &(x * &y.conj()) * z,
        &(x * y) * &z.conj(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> GaussianInt {
        GaussianInt::new(re, im)
    }

    fn triple(r: i64, s: i64, t: i64) -> ChiTriple {
        ChiTriple {
            r: r.into(),
            s: s.into(),
            t: t.into(),
        }
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi(&g(33, 4)), triple(1337, 1105, 809));
        assert_eq!(chi(&g(1, 0)), triple(1, 1, 1));
        assert_eq!(chi(&g(24, 23)), triple(1151, 1105, -1057));
    }

    #[test]
    fn congruum_examples() {
        let c = congruum_triple(3, 2, 1);
        assert_eq!(
            (c.r, c.s, c.t, c.congruum),
            (17.into(), 13.into(), (-7).into(), 120.into())
        );
        let c = congruum_triple(1, 0, 5);
        assert_eq!(
            (c.r, c.s, c.t, c.congruum),
            (5.into(), 5.into(), 5.into(), 0.into())
        );
        let c = congruum_triple(2, 1, 3);
        assert_eq!(
            (c.r, c.s, c.t, c.congruum),
            (21.into(), 15.into(), (-3).into(), 216.into())
        );
    }

    #[test]
    fn fourth_power_parts() {
        assert_eq!(pow4_parts(&g(2, 1)), ((-7).into(), 24.into()));
        assert_eq!(pow4_parts(&g(1, 1)), ((-4).into(), 0.into()));
        let (_, im) = pow4_parts(&g(33, 4));
        assert_eq!(im, BigInt::from(566544));
        assert_eq!(im, BigInt::from(1337 * 1337 - 1105 * 1105));
    }

    #[test]
    fn t41_degeneracies() {
        let c = t41_holds(&g(1, 1), &g(2, 1), &g(3, 2));
        assert_eq!(c.degeneracy, Some(Degeneracy::FourthPowerReal(Slot::X)));
        assert!(!c.holds());
        let c = t41_holds(&g(2, 1), &g(2, 1), &g(2, 1));
        assert_eq!(
            c.degeneracy,
            Some(Degeneracy::RealMultiples(Slot::X, Slot::Y))
        );
        assert!(!c.holds());
    }

    #[test]
    fn t41_identity_failure() {
        let (x, y, z) = (g(2, 1), g(3, 1), g(3, 2));
        let c = t41_holds(&x, &y, &z);
        assert_eq!(c.degeneracy, None);
        assert!(!c.identity_holds);
        let xy4 = &(x.pow(4)) * &(y.pow(4));
        assert_eq!(xy4, g(-2500, 0));
        assert_eq!((&xy4 * &z.pow(4)).im, BigInt::from(-300000));
        let fast = t41_holds_fourth_i128((-7, 24), (28, 96), (-119, 120)).unwrap();
        assert_eq!(fast, c);
    }

    #[test]
    fn t41_construction() {
        assert_eq!(
            t41_construct(&g(1, 0), &g(1, 0), &g(1, 0)),
            [g(1, 0), g(1, 0), g(1, 0)]
        );
        let [a, b, c] = t41_construct(&g(2, 1), &g(3, 1), &g(3, 2));
        assert_eq!(
            (a.clone(), b.clone(), c.clone()),
            (g(23, 11), g(19, 17), g(25, 5))
        );
        for w in [&a, &b, &c] {
            assert_eq!(w.norm(), BigInt::from(650));
        }
        let im_sum = pow4_parts(&a).1 + pow4_parts(&b).1 + pow4_parts(&c).1;
        assert_eq!(pow4_parts(&a).1, BigInt::from(412896));
        assert_eq!(pow4_parts(&b).1, BigInt::from(93024));
        assert_eq!(pow4_parts(&c).1, BigInt::from(300000));
        assert_eq!(im_sum, BigInt::from(805920));
        assert_eq!(BigInt::from(-300000 + 1105920), im_sum);

        let [a, b, c] = t41_construct(&g(2, 1), &g(2, 1), &g(2, 1));
        assert_eq!([a.clone(), b, c], [g(10, 5), g(10, 5), g(10, 5)]);
        assert_eq!(a.norm(), BigInt::from(125));
    }

    #[test]
    fn canonical_forms() {
        for w in [g(3, 4), g(-4, 3), g(-3, -4), g(4, -3)] {
            let (c, k) = w.canonical_associate();
            assert_eq!(c, g(3, 4));
            assert_eq!(c.times_i_pow(k), w);
        }
        assert_eq!(g(0, -7).canonical(), g(7, 0));
        assert_eq!(g(5, 0).div_exact(&g(2, 1)), Some(g(2, -1)));
        assert_eq!(g(7, 0).div_exact(&g(2, 1)), None);
    }
}
