//! Finite coefficient fields `F_{p^e}`.
//!
//! A [`FieldCtx`] fixes the prime, the degree and the defining modulus, and
//! carries discrete log tables so that multiplication is two lookups.
//! Elements are encoded as integers `Σ c_i p^i` where `c_i` is the
//! coefficient of `a^i` and `a` is the class of the variable modulo the
//! modulus. The same encoding orders elements lexicographically (highest
//! coefficient first), which is the order used whenever a "smallest"
//! element is chosen.
//!
//! Linear algebra and series code work directly on the encoded `u32`
//! values through the raw methods on [`FieldCtx`]; [`FieldElem`] is the
//! checked, self-describing public handle.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Bounds applied when building coefficient fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldLimits {
    pub max_prime: u64,
    /// Root-of-unity orders must be strictly below this.
    pub max_root_order: u64,
    /// Largest field order `p^e` for which log tables are built.
    pub max_order: u64,
}

impl Default for FieldLimits {
    fn default() -> Self {
        Self {
            max_prime: 97,
            max_root_order: 64,
            max_order: 1 << 20,
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= n {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over F_p, lowest coefficient first.

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let top = r.len() - 1;
        let c = (r[top] as u64 * lead_inv as u64 % p as u64) as u32;
        let shift = top - dm;
        for (i, &mi) in m.iter().enumerate() {
            let sub = (c as u64 * mi as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
    poly_rem(&prod, m, p)
}

fn poly_powmod(base: &[u32], mut exp: u64, m: &[u32], p: u32) -> Vec<u32> {
    let mut result = vec![1u32];
    let mut b = poly_rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            result = poly_mulmod(&result, &b, m, p);
        }
        b = poly_mulmod(&b, &b, m, p);
        exp >>= 1;
    }
    result
}

fn poly_sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let n = a.len().max(b.len());
    let mut out: Vec<u32> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    poly_trim(&mut out);
    out
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// Rabin's irreducibility test for a monic polynomial over `F_p`.
pub fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let e = modulus.len() as u64 - 1;
    if e == 0 || modulus[e as usize] != 1 {
        return false;
    }
    if e == 1 {
        return true;
    }
    let x = vec![0u32, 1];
    let frob = |k: u64| {
        let mut cur = x.clone();
        for _ in 0..k {
            cur = poly_powmod(&cur, p as u64, modulus, p);
        }
        cur
    };
    if !poly_sub(&frob(e), &x, p).is_empty() {
        return false;
    }
    for l in prime_factors(e) {
        let h = poly_sub(&frob(e / l), &x, p);
        if poly_gcd(modulus, &h, p).len() != 1 {
            return false;
        }
    }
    true
}

fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
    let count = (p as u64).pow(e);
    for idx in 0..count {
        let mut m = Vec::with_capacity(e as usize + 1);
        let mut rest = idx;
        for _ in 0..e {
            m.push((rest % p as u64) as u32);
            rest /= p as u64;
        }
        m.push(1);
        if is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// A finite field `F_{p^e}` with its defining modulus and log tables.
pub struct FieldCtx {
    p: u32,
    degree: u32,
    modulus: Option<Vec<u32>>,
    order: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.degree == other.degree && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("degree", &self.degree)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl FieldCtx {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Arc<Self>> {
        Self::new(p, 1)
    }

    /// `F_{p^e}` defined by the smallest monic irreducible of degree `e`.
    pub fn new(p: u64, degree: u32) -> Result<Arc<Self>> {
        Self::new_with_limits(p, degree, &FieldLimits::default())
    }

    pub fn new_with_limits(p: u64, degree: u32, limits: &FieldLimits) -> Result<Arc<Self>> {
        check_prime(p, limits)?;
        if degree == 0 {
            return Err(Error::InvalidExtension("field degree must be positive".into()));
        }
        check_order(p, degree, limits)?;
        let modulus = (degree > 1).then(|| smallest_irreducible(p as u32, degree));
        Ok(Arc::new(Self::build(p as u32, degree, modulus)))
    }

    /// `F_p[a]/(modulus)` for a caller-supplied monic modulus, lowest
    /// coefficient first. Fails unless the modulus is irreducible.
    pub fn with_modulus(p: u64, modulus: &[u32]) -> Result<Arc<Self>> {
        let limits = FieldLimits::default();
        check_prime(p, &limits)?;
        let degree = modulus.len().saturating_sub(1) as u32;
        if degree == 0 || modulus.iter().any(|&c| c as u64 >= p) {
            return Err(Error::InvalidExtension("malformed modulus".into()));
        }
        check_order(p, degree, &limits)?;
        if !is_irreducible(modulus, p as u32) {
            return Err(Error::InvalidExtension(format!(
                "modulus {modulus:?} is not irreducible over F_{p}"
            )));
        }
        let modulus = (degree > 1).then(|| modulus.to_vec());
        Ok(Arc::new(Self::build(p as u32, degree, modulus)))
    }

    fn build(p: u32, degree: u32, modulus: Option<Vec<u32>>) -> Self {
        let order = p.pow(degree);
        let mut ctx = Self {
            p,
            degree,
            modulus,
            order,
            exp: Vec::new(),
            log: Vec::new(),
        };
        let group = (order - 1) as u64;
        let factors = prime_factors(group);
        let gen = (1..order)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&l| ctx.slow_pow(g, group / l) != 1)
            })
            .expect("multiplicative group is cyclic");
        let mut exp = Vec::with_capacity(order as usize - 1);
        let mut log = vec![0u32; order as usize];
        let mut cur = 1u32;
        for i in 0..(order - 1) {
            exp.push(cur);
            log[cur as usize] = i;
            cur = ctx.slow_mul(cur, gen);
        }
        ctx.exp = exp;
        ctx.log = log;
        ctx
    }

    fn to_poly(&self, mut v: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.degree as usize);
        for _ in 0..self.degree {
            out.push(v % self.p);
            v /= self.p;
        }
        poly_trim(&mut out);
        out
    }

    fn encode_poly(&self, poly: &[u32]) -> u32 {
        poly.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        match &self.modulus {
            None => ((a as u64 * b as u64) % self.p as u64) as u32,
            Some(m) => {
                let prod = poly_mulmod(&self.to_poly(a), &self.to_poly(b), m, self.p);
                self.encode_poly(&prod)
            }
        }
    }

    fn slow_pow(&self, a: u32, mut e: u64) -> u32 {
        let mut r = 1;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.slow_mul(r, b);
            }
            b = self.slow_mul(b, b);
            e >>= 1;
        }
        r
    }

    pub fn characteristic(&self) -> u64 {
        self.p as u64
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u64 {
        self.order as u64
    }

    /// Monic defining polynomial, lowest coefficient first; `None` for `F_p`.
    pub fn modulus(&self) -> Option<&[u32]> {
        self.modulus.as_deref()
    }

    // Raw arithmetic on encoded values.

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.degree == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let (mut x, mut y, mut out, mut place) = (a, b, 0, 1);
        while x > 0 || y > 0 {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * place;
            place *= self.p;
            x /= self.p;
            y /= self.p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.degree == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        let (mut x, mut out, mut place) = (a, 0, 1);
        while x > 0 {
            let d = (self.p - x % self.p) % self.p;
            out += d * place;
            place *= self.p;
            x /= self.p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.degree == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let s = self.log[a as usize] as u64 + self.log[b as usize] as u64;
        self.exp[(s % (self.order as u64 - 1)) as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.order - 1;
        Some(self.exp[((n - self.log[a as usize]) % n) as usize])
    }

    /// `a^e` for any integer exponent; negative exponents need `a != 0`.
    pub fn pow(&self, a: u32, e: i64) -> Option<u32> {
        if e == 0 {
            return Some(1);
        }
        if a == 0 {
            return if e > 0 { Some(0) } else { None };
        }
        let n = (self.order - 1) as i64;
        let l = (self.log[a as usize] as i64 * e).rem_euclid(n);
        Some(self.exp[l as usize])
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    /// Whether the encoded value lies in the prime subfield.
    pub fn in_prime_field(&self, a: u32) -> bool {
        a < self.p
    }

    pub fn elem(self: &Arc<Self>, value: u32) -> FieldElem {
        assert!(value < self.order, "encoded value out of range");
        FieldElem {
            ctx: Arc::clone(self),
            value,
        }
    }

    pub fn elem_from_coeffs(self: &Arc<Self>, coeffs: &[u32]) -> Result<FieldElem> {
        if coeffs.len() > self.degree as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidExtension(format!(
                "coefficients {coeffs:?} do not describe an element of F_{}^{}",
                self.p, self.degree
            )));
        }
        Ok(self.elem(self.encode_poly(coeffs)))
    }

    pub fn zero(self: &Arc<Self>) -> FieldElem {
        self.elem(0)
    }

    pub fn one(self: &Arc<Self>) -> FieldElem {
        self.elem(1)
    }

    /// Renders an encoded value: an integer for prime fields, otherwise a
    /// polynomial in `a`.
    pub fn render(&self, v: u32) -> String {
        if self.degree == 1 {
            return v.to_string();
        }
        let coeffs: Vec<u32> = (0..self.degree)
            .map(|i| v / self.p.pow(i) % self.p)
            .collect();
        let mut terms = Vec::new();
        for (i, &c) in coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "a".to_string(),
                _ => format!("a^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}{mono}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else if terms.len() == 1 {
            terms.remove(0)
        } else {
            format!("({})", terms.join("+"))
        }
    }
}

fn check_prime(p: u64, limits: &FieldLimits) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p > limits.max_prime {
        return Err(Error::PrimeTooLarge {
            p,
            bound: limits.max_prime,
        });
    }
    Ok(())
}

fn check_order(p: u64, degree: u32, limits: &FieldLimits) -> Result<()> {
    let too_big = Error::FieldTooLarge {
        p,
        degree,
        bound: limits.max_order,
    };
    match p.checked_pow(degree) {
        Some(q) if q <= limits.max_order => Ok(()),
        _ => Err(too_big),
    }
}

/// Smallest field `F_{p^e}` containing a primitive `d`-th root of unity.
pub fn field_make(p: u64, d: u64) -> Result<Arc<FieldCtx>> {
    field_make_with_limits(p, d, &FieldLimits::default())
}

pub fn field_make_with_limits(p: u64, d: u64, limits: &FieldLimits) -> Result<Arc<FieldCtx>> {
    check_prime(p, limits)?;
    if d == 0 || d >= limits.max_root_order {
        return Err(Error::RootOrderTooLarge {
            d,
            bound: limits.max_root_order,
        });
    }
    if d.is_multiple_of(p) {
        return Err(Error::NotCoprime { d, p });
    }
    // multiplicative order of p modulo d
    let mut e = 1u32;
    let mut acc = p % d;
    while d > 1 && acc != 1 {
        acc = acc * p % d;
        e += 1;
    }
    FieldCtx::new_with_limits(p, e, limits)
}

/// The smallest (in encoding order) primitive `d`-th root of unity.
pub fn primitive_root_of_unity(ctx: &Arc<FieldCtx>, d: u64) -> Result<FieldElem> {
    let group = ctx.order() - 1;
    if d == 0 || !group.is_multiple_of(d) {
        return Err(Error::NoRootOfUnity {
            d,
            order: ctx.order(),
        });
    }
    let factors = prime_factors(d);
    let v = (1..ctx.order)
        .find(|&z| {
            ctx.pow(z, d as i64) == Some(1)
                && factors
                    .iter()
                    .all(|&l| ctx.pow(z, (d / l) as i64) != Some(1))
        })
        .expect("cyclic group of order divisible by d");
    Ok(ctx.elem(v))
}

/// An element of a coefficient field together with its context.
#[derive(Clone)]
pub struct FieldElem {
    ctx: Arc<FieldCtx>,
    value: u32,
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && *self.ctx == *other.ctx
    }
}

impl Eq for FieldElem {}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ctx.render(self.value))
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ctx.render(self.value))
    }
}

impl FieldElem {
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    /// Encoded value `Σ c_i p^i`.
    pub fn value(&self) -> u32 {
        self.value
    }

    /// Coefficients over `F_p`, lowest power first, always of length `e`.
    pub fn coeffs(&self) -> Vec<u32> {
        let p = self.ctx.p;
        (0..self.ctx.degree)
            .map(|i| self.value / p.pow(i) % p)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_one(&self) -> bool {
        self.value == 1
    }

    fn same_ctx(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    fn with(&self, value: u32) -> Self {
        Self {
            ctx: Arc::clone(&self.ctx),
            value,
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_ctx(other)?;
        Ok(self.with(self.ctx.add(self.value, other.value)))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_ctx(other)?;
        Ok(self.with(self.ctx.sub(self.value, other.value)))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_ctx(other)?;
        Ok(self.with(self.ctx.mul(self.value, other.value)))
    }

    pub fn inv(&self) -> Result<Self> {
        self.ctx
            .inv(self.value)
            .map(|v| self.with(v))
            .ok_or(Error::ZeroInverse)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        self.ctx
            .pow(self.value, e)
            .map(|v| self.with(v))
            .ok_or(Error::ZeroInverse)
    }

    /// `x ↦ x^p`.
    pub fn frobenius(&self) -> Self {
        self.with(self.ctx.pow(self.value, self.ctx.p as i64).unwrap_or(0))
    }
}

impl Add for &FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        self.checked_add(rhs).expect("field context mismatch")
    }
}

impl Sub for &FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        self.checked_sub(rhs).expect("field context mismatch")
    }
}

impl Mul for &FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        self.checked_mul(rhs).expect("field context mismatch")
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        self.with(self.ctx.neg(self.value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn field_make_picks_smallest_degree() {
        assert_eq!(field_make(7, 3).unwrap().degree(), 1);
        assert_eq!(field_make(2, 3).unwrap().degree(), 2);
        assert_eq!(field_make(5, 1).unwrap().degree(), 1);
        assert_eq!(field_make(5, 3).unwrap().degree(), 2);
        assert_eq!(field_make(2, 7).unwrap().degree(), 3);
    }

    #[test]
    fn field_make_errors() {
        assert_eq!(field_make(6, 1).unwrap_err(), Error::NotPrime(6));
        assert!(matches!(
            field_make(7, 64),
            Err(Error::RootOrderTooLarge { .. })
        ));
        assert!(matches!(field_make(101, 1), Err(Error::PrimeTooLarge { .. })));
        assert!(matches!(field_make(3, 6), Err(Error::NotCoprime { .. })));
    }

    #[test]
    fn f4_uses_the_only_irreducible_quadratic() {
        let f4 = field_make(2, 3).unwrap();
        assert_eq!(f4.modulus(), Some(&[1, 1, 1][..]));
        let alpha = f4.elem_from_coeffs(&[0, 1]).unwrap();
        let sq = &alpha * &alpha;
        assert_eq!(sq.coeffs(), vec![1, 1]);
    }

    #[test]
    fn smallest_modulus_is_lexicographic() {
        // x^2 + 1 is reducible over F_5 (2^2 = -1); x^2 + 2 is the first irreducible
        let f25 = FieldCtx::new(5, 2).unwrap();
        assert_eq!(f25.modulus(), Some(&[2, 0, 1][..]));
        let f8 = FieldCtx::new(2, 3).unwrap();
        assert_eq!(f8.modulus(), Some(&[1, 1, 0, 1][..]));
    }

    #[test]
    fn with_modulus_rejects_reducible() {
        assert!(FieldCtx::with_modulus(5, &[1, 0, 1]).is_err());
        assert!(FieldCtx::with_modulus(5, &[2, 0, 1]).is_ok());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f5 = FieldCtx::prime(5).unwrap();
        assert_eq!((&f5.elem(3) + &f5.elem(4)).value(), 2);
        let f7 = FieldCtx::prime(7).unwrap();
        assert_eq!(f7.elem(3).inv().unwrap().value(), 5);
        assert_eq!(f7.zero().inv().unwrap_err(), Error::ZeroInverse);
        assert_eq!((-&f7.elem(3)).value(), 4);
        assert_eq!(f7.elem(3).pow(-1).unwrap().value(), 5);
    }

    #[test]
    fn context_mismatch_is_reported() {
        let f5 = FieldCtx::prime(5).unwrap();
        let f7 = FieldCtx::prime(7).unwrap();
        assert_eq!(
            f5.one().checked_add(&f7.one()).unwrap_err(),
            Error::ContextMismatch
        );
    }

    #[test]
    fn roots_of_unity() {
        let f7 = field_make(7, 3).unwrap();
        assert_eq!(primitive_root_of_unity(&f7, 3).unwrap().value(), 2);
        let f5 = FieldCtx::prime(5).unwrap();
        assert_eq!(primitive_root_of_unity(&f5, 1).unwrap().value(), 1);
        assert_eq!(primitive_root_of_unity(&f5, 4).unwrap().value(), 2);
        assert!(matches!(
            primitive_root_of_unity(&f5, 3),
            Err(Error::NoRootOfUnity { .. })
        ));
    }

    #[test]
    fn roots_of_unity_have_exact_order() {
        for (p, d) in [(2, 3), (2, 5), (3, 2), (3, 4), (5, 3), (5, 6), (7, 9), (2, 9)] {
            let ctx = field_make(p, d).unwrap();
            let z = primitive_root_of_unity(&ctx, d).unwrap();
            assert!(z.pow(d as i64).unwrap().is_one());
            for j in 1..d {
                assert!(!z.pow(j as i64).unwrap().is_one(), "p={p} d={d} j={j}");
            }
        }
    }

    #[test]
    fn frobenius_is_additive_exhaustively() {
        for (p, e) in [(2, 1), (2, 2), (2, 3), (2, 6), (3, 1), (3, 2), (3, 3), (5, 2), (7, 2)] {
            let ctx = FieldCtx::new(p, e).unwrap();
            let q = ctx.order() as u32;
            if q > 64 {
                continue;
            }
            for a in 0..q {
                for b in 0..q {
                    let x = ctx.elem(a);
                    let y = ctx.elem(b);
                    assert_eq!((&x + &y).frobenius(), &x.frobenius() + &y.frobenius());
                }
            }
        }
    }

    #[test]
    fn render_extension_elements() {
        let f4 = field_make(2, 3).unwrap();
        assert_eq!(f4.render(3), "(a+1)");
        assert_eq!(f4.render(2), "a");
        let f25 = FieldCtx::new(5, 2).unwrap();
        assert_eq!(f25.render(5 * 3 + 4), "(3a+4)");
    }

    fn field_strategy() -> impl Strategy<Value = (Arc<FieldCtx>, u32, u32, u32)> {
        prop_oneof![Just((2u64, 3u32)), Just((3, 2)), Just((5, 2)), Just((7, 1)), Just((2, 5))]
            .prop_flat_map(|(p, e)| {
                let ctx = FieldCtx::new(p, e).unwrap();
                let q = ctx.order() as u32;
                (Just(ctx), 0..q, 0..q, 0..q)
            })
    }

    proptest! {
        #[test]
        fn field_axioms((ctx, a, b, c) in field_strategy()) {
            let (x, y, z) = (ctx.elem(a), ctx.elem(b), ctx.elem(c));
            prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x + &(-&x), ctx.zero());
            if !x.is_zero() {
                prop_assert!((&x * &x.inv().unwrap()).is_one());
            }
        }
    }
}
