//! Table-driven arithmetic in GF(p^e).
//!
//! Elements are dense indices `0..q`. An element's index is the base-`p`
//! evaluation of its coefficient vector (constant term first), so index 0 is
//! the additive identity and index 1 the multiplicative identity.

use thiserror::Error;

/// Largest field order [`make_field`] will tabulate.
pub const MAX_FIELD_ORDER: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime power")]
    NotPrimePower(usize),
    #[error("field order {0} exceeds the cap of {MAX_FIELD_ORDER}")]
    TooLarge(usize),
}

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteField {
    p: usize,
    e: usize,
    q: usize,
    modulus_poly: Vec<usize>,
    add_table: Vec<u16>,
    mul_table: Vec<u16>,
    inv_table: Vec<u16>,
}

impl std::fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteField")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus_poly", &self.modulus_poly)
            .finish_non_exhaustive()
    }
}

impl FiniteField {
    pub fn characteristic(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.e
    }

    pub fn order(&self) -> usize {
        self.q
    }

    /// Monic modulus, constant coefficient first.
    pub fn modulus_poly(&self) -> &[usize] {
        &self.modulus_poly
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add_table[a * self.q + b] as usize
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul_table[a * self.q + b] as usize
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: usize) -> Option<usize> {
        if a == 0 {
            None
        } else {
            Some(self.inv_table[a] as usize)
        }
    }

    pub fn neg(&self, a: usize) -> usize {
        (0..self.q).find(|&b| self.add(a, b) == 0).expect("additive inverse exists")
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// All elements in increasing index order.
    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.q
    }

    /// Coefficient vector (constant term first) of an element.
    pub fn coefficients(&self, a: usize) -> Vec<usize> {
        to_digits(a, self.p, self.e)
    }
}

/// Elements of `field` in increasing index order.
pub fn field_elements(field: &FiniteField) -> Vec<usize> {
    field.elements().collect()
}

/// Splits `q` as `p^e`, or `None` when `q < 2` or `q` has two prime factors.
pub fn prime_power(q: usize) -> Option<(usize, usize)> {
    if q < 2 {
        return None;
    }
    let p = (2..).find(|d| q.is_multiple_of(*d)).expect("q >= 2 has a prime divisor");
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

pub fn is_prime_power(q: usize) -> bool {
    prime_power(q).is_some()
}

/// Builds GF(q) using the lexicographically smallest monic irreducible of
/// degree `e` over Z_p as modulus.
pub fn make_field(q: usize) -> Result<FiniteField, FieldError> {
    let (p, e) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
    if q > MAX_FIELD_ORDER {
        return Err(FieldError::TooLarge(q));
    }
    let modulus_poly = smallest_irreducible(p, e);

    // Addition is digit-wise, so with a = a0 + p*a' the table for p^(j+1)
    // elements follows from the one for p^j.
    let mut add_table = vec![0u16];
    let mut size = 1;
    for _ in 0..e {
        let next = size * p;
        let mut t = vec![0u16; next * next];
        for a in 0..next {
            let (a0, ar) = (a % p, a / p);
            for b in 0..next {
                let (b0, br) = (b % p, b / p);
                t[a * next + b] = ((a0 + b0) % p + p * add_table[ar * size + br] as usize) as u16;
            }
        }
        add_table = t;
        size = next;
    }

    // Powers of a primitive element give log/exp tables; the multiplication
    // table is then filled by index arithmetic.
    let generator = (1..q)
        .find(|&g| multiplicative_order(g, p, e, &modulus_poly) == q - 1)
        .expect("the multiplicative group of a finite field is cyclic");
    let mut exp = Vec::with_capacity(q - 1);
    let mut log = vec![0usize; q];
    let mut x = 1;
    for i in 0..q - 1 {
        exp.push(x);
        log[x] = i;
        x = poly_mul_index(x, generator, p, e, &modulus_poly);
    }

    let mut mul_table = vec![0u16; q * q];
    let mut inv_table = vec![0u16; q];
    for a in 1..q {
        for b in 1..q {
            mul_table[a * q + b] = exp[(log[a] + log[b]) % (q - 1)] as u16;
        }
        inv_table[a] = exp[(q - 1 - log[a]) % (q - 1)] as u16;
    }

    Ok(FiniteField {
        p,
        e,
        q,
        modulus_poly,
        add_table,
        mul_table,
        inv_table,
    })
}

fn to_digits(mut a: usize, p: usize, len: usize) -> Vec<usize> {
    let mut digits = Vec::with_capacity(len);
    for _ in 0..len {
        digits.push(a % p);
        a /= p;
    }
    digits
}

fn from_digits(digits: &[usize], p: usize) -> usize {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Product of two polynomials over Z_p (constant term first).
fn poly_mul(a: &[usize], b: &[usize], p: usize) -> Vec<usize> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem_monic(a: &[usize], m: &[usize], p: usize) -> Vec<usize> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + (p - c) * lead) % p;
        }
        trim(&mut r);
    }
    r
}

fn trim(a: &mut Vec<usize>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_mul_index(a: usize, b: usize, p: usize, e: usize, modulus: &[usize]) -> usize {
    let prod = poly_mul(&to_digits(a, p, e), &to_digits(b, p, e), p);
    let mut r = poly_rem_monic(&prod, modulus, p);
    r.resize(e, 0);
    from_digits(&r, p)
}

fn multiplicative_order(g: usize, p: usize, e: usize, modulus: &[usize]) -> usize {
    let mut x = g;
    let mut order = 1;
    while x != 1 {
        x = poly_mul_index(x, g, p, e, modulus);
        order += 1;
    }
    order
}

/// True when no monic polynomial of degree `1..=deg/2` divides `f`.
fn is_irreducible(f: &[usize], p: usize) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        for low in 0..p.pow(d as u32) {
            let mut g = to_digits(low, p, d);
            g.push(1);
            if poly_rem_monic(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: usize, e: usize) -> Vec<usize> {
    (0..p.pow(e as u32))
        .map(|low| {
            let mut f = to_digits(low, p, e);
            f.push(1);
            f
        })
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}
