//! Laurent series over a coefficient field with explicit precision.
//!
//! A series stores its coefficients densely from its order up to the last
//! nonzero retained term. Every term at an exponent below the precision
//! bound is known; terms at or above it are unknown. Exact series (finite
//! Laurent polynomials) carry no precision bound. Arithmetic propagates
//! precision pessimistically and never reports a term it cannot know.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::FieldCtx;

/// t-adic order of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Finite(i64),
    /// The exact zero series.
    Infinite,
    /// Every known term vanishes; the order is at least the bound.
    AtLeast(i64),
}

impl Order {
    pub fn finite(self) -> Option<i64> {
        match self {
            Order::Finite(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Clone)]
pub struct LaurentSeries {
    ctx: Arc<FieldCtx>,
    /// Exponent of `coeffs[0]`; equals `prec` (or 0 if exact) when empty.
    ord: i64,
    coeffs: Vec<u32>,
    prec: Option<i64>,
}

impl PartialEq for LaurentSeries {
    fn eq(&self, other: &Self) -> bool {
        *self.ctx == *other.ctx
            && self.prec == other.prec
            && self.coeffs == other.coeffs
            && (self.coeffs.is_empty() || self.ord == other.ord)
    }
}

impl Eq for LaurentSeries {}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl LaurentSeries {
    /// Builds `Σ coeffs[i] t^(start+i) + O(t^prec)`; terms at or above
    /// `prec` are discarded.
    pub fn from_coeffs(
        ctx: &Arc<FieldCtx>,
        start: i64,
        coeffs: Vec<u32>,
        prec: Option<i64>,
    ) -> Self {
        let mut s = Self {
            ctx: Arc::clone(ctx),
            ord: start,
            coeffs,
            prec,
        };
        s.normalize();
        s
    }

    pub fn zero(ctx: &Arc<FieldCtx>) -> Self {
        Self::from_coeffs(ctx, 0, Vec::new(), None)
    }

    /// `O(t^prec)`.
    pub fn zero_to(ctx: &Arc<FieldCtx>, prec: i64) -> Self {
        Self::from_coeffs(ctx, prec, Vec::new(), Some(prec))
    }

    pub fn one(ctx: &Arc<FieldCtx>) -> Self {
        Self::monomial(ctx, 1, 0)
    }

    /// `c · t^k`, exact.
    pub fn monomial(ctx: &Arc<FieldCtx>, c: u32, k: i64) -> Self {
        Self::from_coeffs(ctx, k, vec![c], None)
    }

    fn normalize(&mut self) {
        if let Some(p) = self.prec {
            let keep = (p - self.ord).clamp(0, self.coeffs.len() as i64) as usize;
            self.coeffs.truncate(keep);
        }
        let lead = self.coeffs.iter().position(|&c| c != 0);
        match lead {
            None => {
                self.coeffs.clear();
                self.ord = self.prec.unwrap_or(0);
            }
            Some(i) => {
                self.coeffs.drain(..i);
                self.ord += i as i64;
                while self.coeffs.last() == Some(&0) {
                    self.coeffs.pop();
                }
            }
        }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    /// Absolute precision; `None` for exact series.
    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Known coefficient at `t^k`; `None` when `k` is at or above the precision.
    pub fn coeff(&self, k: i64) -> Option<u32> {
        if self.prec.is_some_and(|p| k >= p) {
            return None;
        }
        if self.coeffs.is_empty() || k < self.ord {
            return Some(0);
        }
        Some(self.coeffs.get((k - self.ord) as usize).copied().unwrap_or(0))
    }

    /// Iterator over the nonzero known terms as `(exponent, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(i, &c)| (self.ord + i as i64, c))
    }

    pub fn order(&self) -> Order {
        if !self.coeffs.is_empty() {
            Order::Finite(self.ord)
        } else {
            match self.prec {
                None => Order::Infinite,
                Some(p) => Order::AtLeast(p),
            }
        }
    }

    /// Lower bound for the order; `None` for the exact zero.
    fn ord_bound(&self) -> Option<i64> {
        match self.order() {
            Order::Finite(v) | Order::AtLeast(v) => Some(v),
            Order::Infinite => None,
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let prec = min_prec(self.prec, other.prec);
        let (a, b) = (self.ord_bound(), other.ord_bound());
        let lo = match (a, b) {
            (None, None) => return Ok(Self::zero(&self.ctx)),
            (Some(x), None) | (None, Some(x)) => x,
            (Some(x), Some(y)) => x.min(y),
        };
        let hi_a = self.ord + self.coeffs.len() as i64;
        let hi_b = other.ord + other.coeffs.len() as i64;
        let mut hi = hi_a.max(hi_b).max(lo);
        if let Some(p) = prec {
            hi = hi.min(p);
        }
        let len = (hi - lo).max(0) as usize;
        let mut out = vec![0u32; len];
        for (k, c) in self.terms() {
            if k < hi {
                out[(k - lo) as usize] = c;
            }
        }
        for (k, c) in other.terms() {
            if k < hi {
                let slot = &mut out[(k - lo) as usize];
                *slot = self.ctx.add(*slot, c);
            }
        }
        Ok(Self::from_coeffs(&self.ctx, lo, out, prec))
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|&c| self.ctx.neg(c)).collect();
        Self::from_coeffs(&self.ctx, self.ord, coeffs, self.prec)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let (oa, ob) = match (self.ord_bound(), other.ord_bound()) {
            (Some(x), Some(y)) => (x, y),
            _ => return Ok(Self::zero(&self.ctx)),
        };
        let prec = min_prec(self.prec.map(|p| p + ob), other.prec.map(|p| p + oa));
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            let p = prec.expect("an inexact zero factor bounds the precision");
            return Ok(Self::zero_to(&self.ctx, p));
        }
        let lo = self.ord + other.ord;
        let mut len = self.coeffs.len() + other.coeffs.len() - 1;
        if let Some(p) = prec {
            len = len.min((p - lo).max(0) as usize);
        }
        let mut out = vec![0u32; len];
        for (i, &x) in self.coeffs.iter().enumerate() {
            if x == 0 || i >= len {
                continue;
            }
            for (j, &y) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                out[i + j] = self.ctx.add(out[i + j], self.ctx.mul(x, y));
            }
        }
        Ok(Self::from_coeffs(&self.ctx, lo, out, prec))
    }

    /// Multiplication by a constant of the coefficient field.
    pub fn scale(&self, c: u32) -> Self {
        let coeffs = self.coeffs.iter().map(|&x| self.ctx.mul(x, c)).collect();
        Self::from_coeffs(&self.ctx, self.ord, coeffs, self.prec)
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            ctx: Arc::clone(&self.ctx),
            ord: if self.coeffs.is_empty() && self.prec.is_none() {
                0
            } else {
                self.ord + k
            },
            coeffs: self.coeffs.clone(),
            prec: self.prec.map(|p| p + k),
        }
    }

    /// Substitution `t ↦ z·t`: the coefficient of `t^k` is multiplied by `z^k`.
    pub fn substitute_scaled(&self, z: u32) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let k = self.ord + i as i64;
                self.ctx.mul(c, self.ctx.pow(z, k).expect("z is a unit"))
            })
            .collect();
        Self::from_coeffs(&self.ctx, self.ord, coeffs, self.prec)
    }

    /// Lowers the precision to `prec` (no-op if already lower).
    pub fn with_precision(&self, prec: i64) -> Self {
        Self::from_coeffs(
            &self.ctx,
            self.ord,
            self.coeffs.clone(),
            min_prec(self.prec, Some(prec)),
        )
    }

    /// Multiplicative inverse to the available relative precision.
    ///
    /// Exact monomials invert exactly; other exact series must be given a
    /// precision first with [`LaurentSeries::with_precision`].
    pub fn inv(&self) -> Result<Self> {
        if self.coeffs.is_empty() {
            return Err(Error::ZeroInverse);
        }
        let lead_inv = self.ctx.inv(self.coeffs[0]).expect("leading term nonzero");
        let rel = match self.prec {
            None if self.coeffs.len() == 1 => {
                return Ok(Self::monomial(&self.ctx, lead_inv, -self.ord));
            }
            None => return Err(Error::PrecisionRequired),
            Some(p) => (p - self.ord) as usize,
        };
        let mut out = vec![0u32; rel];
        out[0] = lead_inv;
        for n in 1..rel {
            let mut acc = 0u32;
            for i in 1..=n.min(self.coeffs.len() - 1) {
                acc = self.ctx.add(acc, self.ctx.mul(self.coeffs[i], out[n - i]));
            }
            out[n] = self.ctx.neg(self.ctx.mul(lead_inv, acc));
        }
        Ok(Self::from_coeffs(
            &self.ctx,
            -self.ord,
            out,
            Some(-self.ord + rel as i64),
        ))
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Text form `c*t^-1 + c + c*t + O(t^N)` in the variable `var`.
    pub fn render(&self, var: &str) -> String {
        let mut parts = self.known_terms(var);
        if let Some(p) = self.prec {
            parts.push(format!("O({var}^{p})"));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// Rendered nonzero known terms, lowest exponent first.
    pub fn known_terms(&self, var: &str) -> Vec<String> {
        self
            .terms()
            .map(|(k, c)| {
                let coef = self.ctx.render(c);
                let mono = match k {
                    0 => return coef,
                    1 => var.to_string(),
                    _ => format!("{var}^{k}"),
                };
                if c == 1 {
                    mono
                } else {
                    format!("{coef}*{mono}")
                }
            })
            .collect()
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("t"))
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("t"))
    }
}
