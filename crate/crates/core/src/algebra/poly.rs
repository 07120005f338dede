//! Dense polynomials over a prime field F_p, coefficients stored low to high.

pub(crate) type Poly = Vec<u64>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod_p(a: u64, p: u64) -> u64 {
    crate::arith::pow_mod(a, p - 2, p)
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

/// Quotient and remainder of `a / b`; `b` must be nonzero.
pub(crate) fn div_rem(a: &[u64], b: &[u64], p: u64) -> (Poly, Poly) {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut rem = trim(a.to_vec());
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let lead_inv = inv_mod_p(*b.last().unwrap(), p);
    let mut quot = vec![0u64; rem.len() - b.len() + 1];
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let coeff = rem.last().unwrap() * lead_inv % p;
        quot[shift] = coeff;
        for (j, &bj) in b.iter().enumerate() {
            let idx = shift + j;
            rem[idx] = (rem[idx] + p - coeff * bj % p) % p;
        }
        rem = trim(rem);
    }
    (trim(quot), rem)
}

pub(crate) fn rem(a: &[u64], b: &[u64], p: u64) -> Poly {
    div_rem(a, b, p).1
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm, if `gcd(a, m) = 1`.
pub(crate) fn inv_mod(a: &[u64], m: &[u64], p: u64) -> Option<Poly> {
    let (mut r0, mut r1) = (m.to_vec(), rem(a, m, p));
    let (mut s0, mut s1): (Poly, Poly) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = div_rem(&r0, &r1, p);
        let s = sub(&s0, &mul(&q, &s1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    if r0.len() != 1 {
        return None;
    }
    let scale = inv_mod_p(r0[0], p);
    Some(s0.iter().map(|c| c * scale % p).collect())
}

/// Monic polynomial of degree `deg` whose lower coefficients are the base-`p`
/// digits of `index`.
pub(crate) fn monic_from_index(mut index: u64, deg: u32, p: u64) -> Poly {
    let mut out = Vec::with_capacity(deg as usize + 1);
    for _ in 0..deg {
        out.push(index % p);
        index /= p;
    }
    out.push(1);
    out
}

/// Irreducibility by trial division against every monic polynomial of degree
/// `1..=deg/2`.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let f = trim(f.to_vec());
    if f.len() < 2 {
        return false;
    }
    let deg = (f.len() - 1) as u32;
    for d in 1..=deg / 2 {
        for index in 0..p.pow(d) {
            let g = monic_from_index(index, d, p);
            if rem(&f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The monic irreducible of degree `deg` over F_p with the smallest base-`p`
/// encoding.
pub(crate) fn smallest_irreducible(deg: u32, p: u64) -> Poly {
    (0..p.pow(deg))
        .map(|index| monic_from_index(index, deg, p))
        .find(|f| is_irreducible(f, p))
        .expect("an irreducible polynomial exists in every degree")
}
