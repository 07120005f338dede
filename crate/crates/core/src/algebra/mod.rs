//! Finite coefficient structures ("carriers"): prime fields, extension fields
//! F_{p^r} built as F_p[x]/(f), and the rings Z/nZ.
//!
//! Every element is handled as its canonical `u64` encoding. Prime fields and
//! rings use the residue in `[0, order)`; extension fields use `Σ cᵢ·pⁱ` over
//! the coefficient vector `(c₀, …, c_{r-1})`. Only this module ever looks at
//! coefficient vectors.

mod poly;

use std::fmt;
use std::hash::Hash;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::arith::{self, mul_mod};
use crate::error::{Error, Result};

/// What a carrier is, structurally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CarrierKind {
    PrimeField,
    ExtensionField,
    ModularRing,
}

/// The two families a scan or a CLI invocation asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureKind {
    Field,
    Ring,
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StructureKind::Field => "field",
            StructureKind::Ring => "ring",
        })
    }
}

/// Arithmetic needed to evaluate line sums and square membership.
///
/// Implemented by [`Carrier`] (finite, `u64` encodings) and [`Integers`]
/// (arbitrary precision), so grids over ℤ and over finite carriers share one
/// validator.
pub trait Domain {
    type Elem: Clone + Eq + Hash + Ord + fmt::Debug;

    fn contains(&self, x: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    #[allow(clippy::wrong_self_convention)]
    fn from_int(&self, v: i64) -> Self::Elem;
    fn is_square(&self, x: &Self::Elem) -> bool;
    fn describe(&self, x: &Self::Elem) -> String {
        format!("{x:?}")
    }
}

/// The rational integers ℤ.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Integers;

impl Domain for Integers {
    type Elem = BigInt;

    fn contains(&self, _: &BigInt) -> bool {
        true
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn from_int(&self, v: i64) -> BigInt {
        BigInt::from(v)
    }
    fn is_square(&self, x: &BigInt) -> bool {
        if x.is_negative() {
            return false;
        }
        let r = x.sqrt();
        &r * &r == *x
    }
    fn describe(&self, x: &BigInt) -> String {
        x.to_string()
    }
}

/// The set `{x² : x ∈ carrier}` with O(1) membership.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareSet {
    elements: Vec<u64>,
    member: Vec<bool>,
}

impl SquareSet {
    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        self.member.get(x as usize).copied().unwrap_or(false)
    }
}

/// Which unordered pairs of distinct squares count as center pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExclusionRule {
    /// Every unordered pair of distinct squares. Pairs touching the center
    /// value are impossible anyway since `u + v = 2e²` with `u = e²` forces `v = e²`.
    #[default]
    Standard,
    /// Additionally drop pairs containing the element 2 when the target is 2.
    Literal,
}

/// All unordered pairs `{u, v}` of distinct squares with `u + v = target`,
/// stored as `(u, v)` with `u < v` and sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterPairIndex {
    pub target: u64,
    pub pairs: Vec<(u64, u64)>,
}

impl CenterPairIndex {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// A prime field, an extension field or a ring Z/nZ.
pub struct Carrier {
    kind: CarrierKind,
    order: u64,
    characteristic: u64,
    degree: u32,
    /// Monic modulus `(c₀, …, c_r)` for extension fields, empty otherwise.
    modulus: Vec<u64>,
    squares: OnceLock<SquareSet>,
}

impl Clone for Carrier {
    fn clone(&self) -> Self {
        Carrier {
            kind: self.kind,
            order: self.order,
            characteristic: self.characteristic,
            degree: self.degree,
            modulus: self.modulus.clone(),
            squares: self.squares.clone(),
        }
    }
}

impl PartialEq for Carrier {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.order == other.order && self.modulus == other.modulus
    }
}

impl Eq for Carrier {}

impl fmt::Debug for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Carrier")
            .field("kind", &self.kind)
            .field("order", &self.order)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CarrierKind::PrimeField => write!(f, "F_{}", self.order),
            CarrierKind::ExtensionField => {
                write!(f, "F_{} = F_{}[x]/(", self.order, self.characteristic)?;
                let mut first = true;
                for (i, &c) in self.modulus.iter().enumerate().rev() {
                    if c == 0 {
                        continue;
                    }
                    if !first {
                        f.write_str(" + ")?;
                    }
                    first = false;
                    match (i, c) {
                        (0, c) => write!(f, "{c}")?,
                        (1, 1) => f.write_str("x")?,
                        (1, c) => write!(f, "{c}x")?,
                        (i, 1) => write!(f, "x^{i}")?,
                        (i, c) => write!(f, "{c}x^{i}")?,
                    }
                }
                f.write_str(")")
            }
            CarrierKind::ModularRing => write!(f, "Z/{}Z", self.order),
        }
    }
}

/// Builds a field or ring of the given order.
///
/// Extension fields get the monic irreducible of degree `r` with the smallest
/// base-`p` encoding as modulus.
pub fn make_carrier(kind: StructureKind, order: u64) -> Result<Carrier> {
    match kind {
        StructureKind::Field => Carrier::field(order),
        StructureKind::Ring => Carrier::ring(order),
    }
}

impl Carrier {
    pub fn field(order: u64) -> Result<Carrier> {
        if order < 2 {
            return Err(Error::OrderTooSmall(order));
        }
        let (p, r) = arith::prime_power(order).ok_or(Error::NotPrimePower(order))?;
        if r == 1 {
            Ok(Carrier::new(
                CarrierKind::PrimeField,
                order,
                p,
                1,
                Vec::new(),
            ))
        } else {
            let modulus = poly::smallest_irreducible(r, p);
            Ok(Carrier::new(
                CarrierKind::ExtensionField,
                order,
                p,
                r,
                modulus,
            ))
        }
    }

    /// F_{p^r} with an explicit monic modulus `(c₀, …, c_r)`.
    pub fn field_with_modulus(order: u64, modulus: &[u64]) -> Result<Carrier> {
        if order < 2 {
            return Err(Error::OrderTooSmall(order));
        }
        let (p, r) = arith::prime_power(order).ok_or(Error::NotPrimePower(order))?;
        let bad = || Error::BadModulus {
            p,
            degree: r,
            poly: modulus.to_vec(),
        };
        if modulus.len() != r as usize + 1
            || modulus.last() != Some(&1)
            || modulus.iter().any(|&c| c >= p)
        {
            return Err(bad());
        }
        if r == 1 {
            return Ok(Carrier::new(
                CarrierKind::PrimeField,
                order,
                p,
                1,
                Vec::new(),
            ));
        }
        if !poly::is_irreducible(modulus, p) {
            return Err(bad());
        }
        Ok(Carrier::new(
            CarrierKind::ExtensionField,
            order,
            p,
            r,
            modulus.to_vec(),
        ))
    }

    pub fn ring(order: u64) -> Result<Carrier> {
        if order < 2 {
            return Err(Error::OrderTooSmall(order));
        }
        Ok(Carrier::new(
            CarrierKind::ModularRing,
            order,
            0,
            1,
            Vec::new(),
        ))
    }

    fn new(
        kind: CarrierKind,
        order: u64,
        characteristic: u64,
        degree: u32,
        modulus: Vec<u64>,
    ) -> Self {
        Carrier {
            kind,
            order,
            characteristic,
            degree,
            modulus,
            squares: OnceLock::new(),
        }
    }

    pub fn kind(&self) -> CarrierKind {
        self.kind
    }

    pub fn structure(&self) -> StructureKind {
        match self.kind {
            CarrierKind::ModularRing => StructureKind::Ring,
            _ => StructureKind::Field,
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Characteristic `p` of a field; for Z/nZ this is `n`.
    pub fn characteristic(&self) -> u64 {
        match self.kind {
            CarrierKind::ModularRing => self.order,
            _ => self.characteristic,
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Monic modulus `(c₀, …, c_r)`; `None` unless this is an extension field.
    pub fn modulus_poly(&self) -> Option<&[u64]> {
        (self.kind == CarrierKind::ExtensionField).then_some(self.modulus.as_slice())
    }

    pub fn is_field(&self) -> bool {
        self.kind != CarrierKind::ModularRing
    }

    fn is_extension(&self) -> bool {
        self.kind == CarrierKind::ExtensionField
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        x < self.order
    }

    /// Coefficient vector `(c₀, …, c_{r-1})`; a single residue for
    /// prime fields and rings.
    pub fn decode(&self, mut x: u64) -> Vec<u64> {
        if !self.is_extension() {
            return vec![x];
        }
        let p = self.characteristic;
        (0..self.degree)
            .map(|_| {
                let c = x % p;
                x /= p;
                c
            })
            .collect()
    }

    /// Inverse of [`Carrier::decode`]; rejects vectors that are not elements.
    pub fn encode(&self, coeffs: &[u64]) -> Result<u64> {
        let base = self.characteristic();
        let len = if self.is_extension() {
            self.degree as usize
        } else {
            1
        };
        if coeffs.len() != len || coeffs.iter().any(|&c| c >= base) {
            return Err(Error::NotInCarrier {
                element: format!("{coeffs:?}"),
                order: self.order,
            });
        }
        Ok(coeffs.iter().rev().fold(0u64, |acc, &c| acc * base + c))
    }

    pub fn zero(&self) -> u64 {
        0
    }

    pub fn one(&self) -> u64 {
        1 % self.order
    }

    /// Image of a rational integer (constant polynomial for extensions).
    pub fn from_int(&self, v: i64) -> u64 {
        let m = self.characteristic() as i128;
        (v as i128).rem_euclid(m) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.is_extension() {
            let p = self.characteristic;
            let (mut a, mut b) = (a, b);
            let (mut out, mut place) = (0u64, 1u64);
            for _ in 0..self.degree {
                out += ((a % p + b % p) % p) * place;
                a /= p;
                b /= p;
                place *= p;
            }
            out
        } else {
            let s = a + b;
            if s >= self.order {
                s - self.order
            } else {
                s
            }
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        if self.is_extension() {
            let p = self.characteristic;
            let (mut a, mut out, mut place) = (a, 0u64, 1u64);
            for _ in 0..self.degree {
                out += ((p - a % p) % p) * place;
                a /= p;
                place *= p;
            }
            out
        } else if a == 0 {
            0
        } else {
            self.order - a
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.is_extension() {
            let p = self.characteristic;
            let prod = poly::mul(&self.decode(a), &self.decode(b), p);
            self.encode_poly(&poly::rem(&prod, &self.modulus, p))
        } else {
            mul_mod(a, b, self.order)
        }
    }

    fn encode_poly(&self, f: &[u64]) -> u64 {
        let p = self.characteristic;
        f.iter().rev().fold(0u64, |acc, &c| acc * p + c)
    }

    pub fn square(&self, a: u64) -> u64 {
        self.mul(a, a)
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn is_unit(&self, a: u64) -> bool {
        match self.kind {
            CarrierKind::ModularRing => arith::gcd(a, self.order) == 1,
            _ => a != 0 && a < self.order,
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(&self, a: u64) -> Result<u64> {
        if !self.contains(a) || !self.is_unit(a) {
            return Err(Error::NotAUnit(a));
        }
        if self.is_extension() {
            let p = self.characteristic;
            poly::inv_mod(&self.decode(a), &self.modulus, p)
                .map(|f| self.encode_poly(&f))
                .ok_or(Error::NotAUnit(a))
        } else {
            let n = self.order as i128;
            let (mut r0, mut r1) = (n, a as i128);
            let (mut s0, mut s1) = (0i128, 1i128);
            while r1 != 0 {
                let q = r0 / r1;
                (r0, r1) = (r1, r0 - q * r1);
                (s0, s1) = (s1, s0 - q * s1);
            }
            if r0 != 1 {
                return Err(Error::NotAUnit(a));
            }
            Ok(s0.rem_euclid(n) as u64)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.order
    }

    pub fn units(&self) -> Vec<u64> {
        self.elements().filter(|&x| self.is_unit(x)).collect()
    }

    /// The square set, computed once as the image of `x ↦ x²`.
    pub fn squares(&self) -> &SquareSet {
        self.squares.get_or_init(|| {
            let mut member = vec![false; self.order as usize];
            for x in self.elements() {
                member[self.square(x) as usize] = true;
            }
            let elements = (0..self.order).filter(|&x| member[x as usize]).collect();
            SquareSet { elements, member }
        })
    }

    /// JSON form of an element: an integer, or a coefficient array for
    /// extension fields.
    pub fn element_to_json(&self, x: u64) -> serde_json::Value {
        if self.is_extension() {
            serde_json::Value::from(self.decode(x))
        } else {
            serde_json::Value::from(x)
        }
    }

    pub fn element_from_json(&self, v: &serde_json::Value) -> Result<u64> {
        let bad = || Error::NotInCarrier {
            element: v.to_string(),
            order: self.order,
        };
        match v {
            serde_json::Value::Number(n) => {
                let x = n.as_u64().ok_or_else(bad)?;
                if self.contains(x) {
                    Ok(x)
                } else {
                    Err(bad())
                }
            }
            serde_json::Value::Array(items) => {
                let coeffs = items
                    .iter()
                    .map(|c| c.as_u64().ok_or_else(bad))
                    .collect::<Result<Vec<_>>>()?;
                self.encode(&coeffs)
            }
            _ => Err(bad()),
        }
    }
}

impl Domain for Carrier {
    type Elem = u64;

    fn contains(&self, x: &u64) -> bool {
        Carrier::contains(self, *x)
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        Carrier::add(self, *a, *b)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        Carrier::sub(self, *a, *b)
    }
    fn neg(&self, a: &u64) -> u64 {
        Carrier::neg(self, *a)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        Carrier::mul(self, *a, *b)
    }
    fn from_int(&self, v: i64) -> u64 {
        Carrier::from_int(self, v)
    }
    fn is_square(&self, x: &u64) -> bool {
        self.squares().contains(*x)
    }
    fn describe(&self, x: &u64) -> String {
        if self.is_extension() {
            format!("{:?}", self.decode(*x))
        } else {
            x.to_string()
        }
    }
}

pub fn squares(c: &Carrier) -> &SquareSet {
    c.squares()
}

/// Center pairs for the center root `e`: unordered pairs of distinct squares
/// summing to `2e²`.
pub fn center_pairs(c: &Carrier, e: u64, rule: ExclusionRule) -> CenterPairIndex {
    let e2 = c.square(e);
    pairs_summing_to(c, c.add(e2, e2), rule)
}

/// Unordered pairs of distinct squares summing to `target`.
pub fn pairs_summing_to(c: &Carrier, target: u64, rule: ExclusionRule) -> CenterPairIndex {
    let squares = c.squares();
    let two = c.from_int(2);
    let mut pairs: Vec<(u64, u64)> = squares
        .elements()
        .iter()
        .filter_map(|&u| {
            let v = c.sub(target, u);
            (u < v && squares.contains(v)).then_some((u, v))
        })
        .filter(|&(u, v)| match rule {
            ExclusionRule::Standard => true,
            ExclusionRule::Literal => target != two || (u != two && v != two),
        })
        .collect();
    pairs.sort_unstable();
    CenterPairIndex { target, pairs }
}

/// Residues of every divisor `m | n`, in ascending order of `m` (so `n ↦ 0` is last).
pub fn divisor_representatives(n: u64) -> Vec<u64> {
    arith::divisors(n).into_iter().map(|m| m % n).collect()
}

/// Triples `(s−1, s, s+1)` of squares, none of them 0 or 1.
///
/// These are the `(γ², β², α²)` that parametrize center-zero magic squares after
/// scaling a corner to 1. Meaningful for fields.
pub fn consecutive_square_triples(c: &Carrier) -> Vec<(u64, u64, u64)> {
    let squares = c.squares();
    let one = c.one();
    squares
        .elements()
        .iter()
        .filter_map(|&s| {
            let lo = c.sub(s, one);
            let hi = c.add(s, one);
            let triple = [lo, s, hi];
            (triple
                .iter()
                .all(|&x| squares.contains(x) && x != 0 && x != one))
            .then_some((lo, s, hi))
        })
        .collect()
}
