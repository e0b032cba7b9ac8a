//! Totally ramified Galois extensions `R'/R` of `R = k[[t]]`.
//!
//! Three shapes are built:
//!
//! * tame (Kummer): `s^d = t`, generator `τ(s) = ζ s`;
//! * wild (Artin–Schreier): `y^p - y = t^-m`, generator `σ(y) = y + 1`;
//! * compositum: `s^d = t` and `y^p - y = s^-m`.
//!
//! Elements of `K'` are written `Σ_{i<p} a_i(π) y^i` with Laurent series
//! coefficients in `π` (`π = s` when a tame part is present, else `π = t`).
//! Every monomial `π^a y^i` has valuation `ν(π)·a - m·i`, and these are
//! pairwise distinct modulo `p` for distinct `i`, so the valuation of a sum
//! is the minimum over its monomials.
//!
//! In the compositum the tame generator must respect the defining equation:
//! `τ(y)^p - τ(y) = ζ^-m s^-m` forces `τ(y) = c·y` with `c = ζ^-m`, which is
//! possible only when `c` lies in the prime field. The group is then the
//! semidirect product `⟨σ⟩ ⋊ ⟨τ⟩` with `τστ⁻¹ = σ^r`, `r = c⁻¹ mod p`; it is
//! a direct product exactly when `d | m`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{field_make, primitive_root_of_unity, FieldCtx};
use crate::linalg::Matrix;
use crate::series::{LaurentSeries, Order};

/// Input data for an extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtensionSpec {
    pub p: u64,
    /// Degree of the tame part (1 = none).
    pub tame_d: u64,
    /// Pole order of the Artin–Schreier part (`None` = no wild part).
    pub as_m: Option<u64>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl ExtensionSpec {
    pub fn new(p: u64, tame_d: u64, as_m: Option<u64>) -> Result<Self> {
        let spec = Self { p, tame_d, as_m };
        spec.validate()?;
        Ok(spec)
    }

    pub fn artin_schreier(p: u64, m: u64) -> Result<Self> {
        Self::new(p, 1, Some(m))
    }

    pub fn tame(p: u64, d: u64) -> Result<Self> {
        Self::new(p, d, None)
    }

    pub fn validate(&self) -> Result<()> {
        if !crate::field::is_prime(self.p) {
            return Err(Error::NotPrime(self.p));
        }
        if self.tame_d == 0 || gcd(self.tame_d, self.p) != 1 {
            return Err(Error::NotCoprime {
                d: self.tame_d,
                p: self.p,
            });
        }
        if let Some(m) = self.as_m {
            if m == 0 || gcd(m, self.p) != 1 {
                return Err(Error::NotCoprime { d: m, p: self.p });
            }
        }
        if self.tame_d == 1 && self.as_m.is_none() {
            return Err(Error::InvalidExtension(
                "need a tame part (d > 1) or a wild part (m)".into(),
            ));
        }
        Ok(())
    }

    pub fn is_wild(&self) -> bool {
        self.as_m.is_some()
    }

    /// `p` if wild, else 1.
    pub fn wild_order(&self) -> u64 {
        if self.is_wild() {
            self.p
        } else {
            1
        }
    }

    /// Ramification index `e = [K' : K]`.
    pub fn ramification_index(&self) -> u64 {
        self.tame_d * self.wild_order()
    }

    /// Default working precision in valuation units, `4·e·(m+2)`.
    pub fn precision_floor(&self) -> usize {
        let m = self.as_m.unwrap_or(0);
        (4 * self.ramification_index() * (m + 2)) as usize
    }
}

/// A generator of the Galois group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    /// Wild generator, `y ↦ y + 1`.
    Sigma,
    /// Tame generator, `s ↦ ζ s`.
    Tau,
}

/// A word in the generators, applied right to left: `[g1, g2]` acts as
/// `g1 ∘ g2`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GaloisWord(pub Vec<Generator>);

impl GaloisWord {
    /// The element `σ^l τ^j`.
    pub fn sigma_tau(l: u64, j: u64) -> Self {
        let mut w = vec![Generator::Sigma; l as usize];
        w.extend(std::iter::repeat_n(Generator::Tau, j as usize));
        Self(w)
    }
}

/// Element of `K'`: coordinates `a_i(π)` of `y^i`, `i < p` (a single
/// coordinate without a wild part).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtElem {
    coords: Vec<LaurentSeries>,
}

impl ExtElem {
    pub fn coords(&self) -> &[LaurentSeries] {
        &self.coords
    }
}

/// A constructed extension with its Galois generators.
#[derive(Debug, Clone)]
pub struct LocalExtension {
    spec: ExtensionSpec,
    field: Arc<FieldCtx>,
    zeta: u32,
    /// `τ(y) = c·y`.
    tau_y: u32,
    /// `τστ⁻¹ = σ^r`.
    conj: u64,
    pi_val: i64,
    uniformizer: (i64, usize),
    precision: usize,
}

fn binomial_mod(n: u64, k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    // Lucas is unnecessary here: n < p for every call.
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num = num * ((n - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    let mut inv = 1u64;
    let mut b = den;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            inv = inv * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    num * inv % p
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    (1..p).find(|&x| a * x % p == 1).expect("unit modulo p")
}

/// Builds the extension at the default precision floor.
pub fn build_extension(spec: ExtensionSpec) -> Result<LocalExtension> {
    LocalExtension::build(spec, spec.precision_floor())
}

impl LocalExtension {
    /// Builds the extension with working precision `precision` (valuation
    /// units), which must be at least [`ExtensionSpec::precision_floor`].
    pub fn build(spec: ExtensionSpec, precision: usize) -> Result<Self> {
        spec.validate()?;
        let floor = spec.precision_floor();
        if precision < floor {
            return Err(Error::PrecisionBelowFloor {
                given: precision,
                floor,
            });
        }
        let field = field_make(spec.p, spec.tame_d)?;
        let zeta = primitive_root_of_unity(&field, spec.tame_d)?.value();
        let p = spec.p;
        let (tau_y, conj, pi_val, uniformizer) = match spec.as_m {
            None => (1, 1, 1, (1, 0)),
            Some(m) => {
                let c = field
                    .pow(zeta, -(m as i64))
                    .expect("zeta is a unit");
                if !field.in_prime_field(c) {
                    return Err(Error::NotGalois { p, m });
                }
                let conj = mod_inverse(c as u64, p);
                // a·p - c·m = 1 with 0 < c < p
                let minv = mod_inverse(m % p, p);
                let cexp = (p - minv) % p;
                let a = (1 + cexp * m) / p;
                (c, conj, p as i64, (a as i64, cexp as usize))
            }
        };
        Ok(Self {
            spec,
            field,
            zeta,
            tau_y,
            conj,
            pi_val,
            uniformizer,
            precision,
        })
    }

    /// The same extension at another working precision.
    pub fn with_precision(&self, precision: usize) -> Result<Self> {
        Self::build(self.spec, precision)
    }

    pub fn spec(&self) -> &ExtensionSpec {
        &self.spec
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// The primitive `d`-th root of unity used by `τ`.
    pub fn zeta(&self) -> u32 {
        self.zeta
    }

    /// Exponent `r` with `τστ⁻¹ = σ^r`.
    pub fn conjugation_exponent(&self) -> u64 {
        self.conj
    }

    pub fn ramification_index(&self) -> u64 {
        self.spec.ramification_index()
    }

    fn m(&self) -> i64 {
        self.spec.as_m.unwrap_or(0) as i64
    }

    fn width(&self) -> usize {
        self.spec.wild_order() as usize
    }

    /// `ν(π)`.
    pub fn pi_valuation(&self) -> i64 {
        self.pi_val
    }

    /// Exponents `(a, c)` with `u' = π^a y^c`.
    pub fn uniformizer_exponents(&self) -> (i64, usize) {
        self.uniformizer
    }

    /// Name of the Laurent variable of the coordinates.
    pub fn variable(&self) -> &'static str {
        if self.spec.tame_d > 1 {
            "s"
        } else {
            "t"
        }
    }

    fn zero_coords(&self) -> Vec<LaurentSeries> {
        vec![LaurentSeries::zero(&self.field); self.width()]
    }

    pub fn zero(&self) -> ExtElem {
        ExtElem {
            coords: self.zero_coords(),
        }
    }

    /// `c · π^a · y^i`, exact.
    pub fn monomial(&self, c: u32, a: i64, i: usize) -> ExtElem {
        assert!(i < self.width(), "y-degree out of range");
        let mut coords = self.zero_coords();
        coords[i] = LaurentSeries::monomial(&self.field, c, a);
        ExtElem { coords }
    }

    pub fn one(&self) -> ExtElem {
        self.monomial(1, 0, 0)
    }

    /// The base uniformizer `t = π^d` (or `π` when there is no tame part).
    pub fn t(&self) -> ExtElem {
        self.monomial(1, self.spec.tame_d as i64, 0)
    }

    pub fn pi(&self) -> ExtElem {
        self.monomial(1, 1, 0)
    }

    /// The Artin–Schreier generator `y`.
    pub fn y(&self) -> Result<ExtElem> {
        if !self.spec.is_wild() {
            return Err(Error::InvalidExtension("no wild part".into()));
        }
        Ok(self.monomial(1, 0, 1))
    }

    /// `y⁻¹ = π^m (y^{p-1} - 1)`.
    pub fn y_inverse(&self) -> Result<ExtElem> {
        self.y()?;
        let top = self.monomial(1, self.m(), self.width() - 1);
        let low = self.monomial(1, self.m(), 0);
        self.sub(&top, &low)
    }

    /// The uniformizer `u' = π^a y^c`, exact.
    pub fn uniformizer(&self) -> ExtElem {
        let (a, c) = self.uniformizer;
        self.monomial(1, a, c)
    }

    /// Builds an element from coordinates in the Laurent variable.
    pub fn element(&self, coords: Vec<LaurentSeries>) -> Result<ExtElem> {
        if coords.len() != self.width() {
            return Err(Error::InvalidExtension(format!(
                "expected {} coordinates, got {}",
                self.width(),
                coords.len()
            )));
        }
        if coords.iter().any(|c| **c.ctx() != *self.field) {
            return Err(Error::ContextMismatch);
        }
        Ok(ExtElem { coords })
    }

    /// Truncates `x` to the working precision: `x + O(ν ≥ N)`.
    pub fn at_working_precision(&self, x: &ExtElem) -> ExtElem {
        self.truncate(x, self.precision as i64)
    }

    /// `x + O(ν ≥ n)`.
    pub fn truncate(&self, x: &ExtElem, n: i64) -> ExtElem {
        let coords = x
            .coords
            .iter()
            .enumerate()
            .map(|(i, a)| {
                // π^a y^i has ν < n iff a < (n + m i) / ν(π)
                let bound = (n + self.m() * i as i64 + self.pi_val - 1).div_euclid(self.pi_val);
                a.with_precision(bound)
            })
            .collect();
        ExtElem { coords }
    }

    pub fn add(&self, x: &ExtElem, y: &ExtElem) -> Result<ExtElem> {
        let coords = x
            .coords
            .iter()
            .zip(&y.coords)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(ExtElem { coords })
    }

    pub fn neg(&self, x: &ExtElem) -> ExtElem {
        ExtElem {
            coords: x.coords.iter().map(LaurentSeries::neg).collect(),
        }
    }

    pub fn sub(&self, x: &ExtElem, y: &ExtElem) -> Result<ExtElem> {
        self.add(x, &self.neg(y))
    }

    pub fn scale(&self, x: &ExtElem, c: u32) -> ExtElem {
        ExtElem {
            coords: x.coords.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn mul(&self, x: &ExtElem, y: &ExtElem) -> Result<ExtElem> {
        let w = self.width();
        let mut prod = vec![LaurentSeries::zero(&self.field); 2 * w - 1];
        for (i, a) in x.coords.iter().enumerate() {
            if a.order() == Order::Infinite {
                continue;
            }
            for (j, b) in y.coords.iter().enumerate() {
                if b.order() == Order::Infinite {
                    continue;
                }
                prod[i + j] = prod[i + j].add(&a.mul(b)?)?;
            }
        }
        // y^k = y^{k-p+1} + π^{-m} y^{k-p} for k ≥ p
        for k in (w..2 * w - 1).rev() {
            let top = std::mem::replace(&mut prod[k], LaurentSeries::zero(&self.field));
            prod[k - w + 1] = prod[k - w + 1].add(&top)?;
            prod[k - w] = prod[k - w].add(&top.shift(-self.m()))?;
        }
        prod.truncate(w);
        Ok(ExtElem { coords: prod })
    }

    pub fn pow(&self, x: &ExtElem, e: u32) -> Result<ExtElem> {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, x)?;
        }
        Ok(acc)
    }

    /// Valuation `ν(x)`, exact when determined by the known terms.
    pub fn valuation(&self, x: &ExtElem) -> Order {
        let mut known: Option<i64> = None;
        let mut unknown: Option<i64> = None;
        for (i, a) in x.coords.iter().enumerate() {
            let shift = -self.m() * i as i64;
            match a.order() {
                Order::Finite(o) => {
                    let v = self.pi_val * o + shift;
                    known = Some(known.map_or(v, |k| k.min(v)));
                }
                Order::AtLeast(b) => {
                    let v = self.pi_val * b + shift;
                    unknown = Some(unknown.map_or(v, |u| u.min(v)));
                }
                Order::Infinite => {}
            }
        }
        match (known, unknown) {
            (None, None) => Order::Infinite,
            (Some(k), None) => Order::Finite(k),
            (Some(k), Some(u)) if k < u => Order::Finite(k),
            (_, Some(u)) => Order::AtLeast(u),
        }
    }

    /// Precision of `x` in valuation units; `None` if exact.
    pub fn element_precision(&self, x: &ExtElem) -> Option<i64> {
        x.coords
            .iter()
            .enumerate()
            .filter_map(|(i, a)| {
                a.precision()
                    .map(|p| self.pi_val * p - self.m() * i as i64)
            })
            .min()
    }

    /// `σ^l(x)`: `y ↦ y + l`.
    pub fn sigma_power(&self, l: u64, x: &ExtElem) -> Result<ExtElem> {
        if !self.spec.is_wild() {
            return Ok(x.clone());
        }
        let p = self.spec.p;
        let l = l % p;
        let mut out = self.zero_coords();
        for (i, a) in x.coords.iter().enumerate() {
            if a.order() == Order::Infinite {
                continue;
            }
            for (j, slot) in out.iter_mut().enumerate().take(i + 1) {
                // (y + l)^i contributes C(i, j) l^{i-j} y^j
                let c = binomial_mod(i as u64, j as u64, p) * pow_mod(l, (i - j) as u64, p) % p;
                if c != 0 {
                    *slot = slot.add(&a.scale(self.field.from_int(c as i64)))?;
                }
            }
        }
        Ok(ExtElem { coords: out })
    }

    /// `τ^j(x)`: `s ↦ ζ^j s` and `y ↦ c^j y`.
    pub fn tau_power(&self, j: u64, x: &ExtElem) -> ExtElem {
        if self.spec.tame_d == 1 {
            return x.clone();
        }
        let z = self.field.pow(self.zeta, j as i64).expect("unit");
        let cy = self.field.pow(self.tau_y, j as i64).expect("unit");
        let coords = x
            .coords
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let scale = self.field.pow(cy, i as i64).expect("unit");
                a.substitute_scaled(z).scale(scale)
            })
            .collect();
        ExtElem { coords }
    }

    pub fn apply_generator(&self, g: Generator, x: &ExtElem) -> Result<ExtElem> {
        match g {
            Generator::Sigma => self.sigma_power(1, x),
            Generator::Tau => Ok(self.tau_power(1, x)),
        }
    }

    /// Applies a word of generators (rightmost first).
    pub fn apply_galois(&self, word: &GaloisWord, x: &ExtElem) -> Result<ExtElem> {
        word.0
            .iter()
            .rev()
            .try_fold(x.clone(), |acc, &g| self.apply_generator(g, &acc))
    }

    /// `σ^l τ^j (x)`.
    pub fn apply_element(&self, l: u64, j: u64, x: &ExtElem) -> Result<ExtElem> {
        self.sigma_power(l, &self.tau_power(j, x))
    }

    /// `ν(g(u') - u') - 1` for `g = σ^l τ^j` evaluated at working precision.
    fn shift_of(&self, l: u64, j: u64) -> Result<Order> {
        let u = self.at_working_precision(&self.uniformizer());
        let diff = self.sub(&self.apply_element(l, j, &u)?, &u)?;
        Ok(match self.valuation(&diff) {
            Order::Finite(v) => Order::Finite(v - 1),
            other => other,
        })
    }

    /// Lower ramification data of the wild part, computed from the action
    /// on the uniformizer.
    pub fn ramification_profile(&self) -> Result<RamificationProfile> {
        if !self.spec.is_wild() {
            return Err(Error::InvalidExtension(
                "ramification profile needs a wild part".into(),
            ));
        }
        let p = self.spec.p;
        let mut i_table = Vec::with_capacity(p as usize - 1);
        for l in 1..p {
            match self.shift_of(l, 0)? {
                Order::Finite(v) if v >= 1 => i_table.push(v as u64),
                Order::Finite(v) => {
                    return Err(Error::InvalidExtension(format!(
                        "wild element sigma^{l} has i = {v} < 1"
                    )))
                }
                other => {
                    return Err(Error::PrecisionExhausted(format!(
                        "nu(sigma^{l}(u') - u') undetermined ({other:?}) at precision {}",
                        self.precision
                    )))
                }
            }
        }
        let mut breaks = i_table.clone();
        breaks.sort_unstable();
        breaks.dedup();
        RamificationProfile::new(p, 1, self.spec.tame_d, breaks, i_table)
    }

    /// [`Self::ramification_profile`], doubling the precision up to three
    /// times when it is exhausted.
    pub fn ramification_profile_with_retry(&self) -> Result<RamificationProfile> {
        let mut ext = self.clone();
        let mut last = None;
        for _ in 0..4 {
            match ext.ramification_profile() {
                Err(e @ Error::PrecisionExhausted(_)) => {
                    last = Some(e);
                    ext = ext.with_precision(ext.precision * 2)?;
                }
                other => return other,
            }
        }
        Err(last.expect("loop ran"))
    }

    /// Serre's `i_G(g) = ν(g(u') - u')` for `g = σ^l τ^j ≠ 1`.
    pub fn lower_index(&self, l: u64, j: u64) -> Result<u64> {
        match self.shift_of(l, j)? {
            Order::Finite(v) => Ok((v + 1) as u64),
            Order::Infinite => Err(Error::InvalidExtension("identity has no index".into())),
            Order::AtLeast(_) => Err(Error::PrecisionExhausted(format!(
                "index of sigma^{l} tau^{j} at precision {}",
                self.precision
            ))),
        }
    }

    /// Valuation of the different, `Σ_{g≠1} i_G(g)`.
    pub fn different_exponent(&self) -> Result<u64> {
        let mut total = 0;
        for j in 0..self.spec.tame_d {
            for l in 0..self.spec.wild_order() {
                if l == 0 && j == 0 {
                    continue;
                }
                total += self.lower_index(l, j)?;
            }
        }
        Ok(total)
    }

    /// Ramification groups `G_i` for `i = 0..=last`, each as the list of
    /// `(l, j)` with `σ^l τ^j ∈ G_i`; stops after the first trivial group.
    pub fn lower_ramification_groups(&self) -> Result<Vec<Vec<(u64, u64)>>> {
        let mut elems = Vec::new();
        for j in 0..self.spec.tame_d {
            for l in 0..self.spec.wild_order() {
                let idx = if l == 0 && j == 0 {
                    u64::MAX
                } else {
                    self.lower_index(l, j)?
                };
                elems.push(((l, j), idx));
            }
        }
        let mut groups = Vec::new();
        for i in 0.. {
            let g: Vec<(u64, u64)> = elems
                .iter()
                .filter(|(_, idx)| *idx > i)
                .map(|(e, _)| *e)
                .collect();
            let trivial = g.len() == 1;
            groups.push(g);
            if trivial {
                break;
            }
        }
        Ok(groups)
    }

    /// Valuation-ordered monomial basis of `R'/m'^n`: entry `v` is the
    /// unique `(a, i)` with `ν(π^a y^i) = v`.
    pub fn valuation_basis(&self, n: usize) -> Vec<(i64, usize)> {
        let w = self.width() as i64;
        (0..n as i64)
            .map(|v| {
                if w == 1 {
                    return (v, 0);
                }
                let m = self.m();
                let minv = mod_inverse((m % w) as u64, w as u64) as i64;
                let i = (-v * minv).rem_euclid(w);
                ((v + m * i) / self.pi_val, i as usize)
            })
            .collect()
    }

    /// Coordinates of `x` modulo `m'^n` in the valuation basis.
    pub fn coordinates(&self, x: &ExtElem, n: usize) -> Result<Vec<u32>> {
        if let Some(prec) = self.element_precision(x) {
            if prec < n as i64 {
                return Err(Error::PrecisionExhausted(format!(
                    "element known to nu < {prec}, need {n}"
                )));
            }
        }
        let mut out = vec![0u32; n];
        for (i, a) in x.coords.iter().enumerate() {
            for (k, c) in a.terms() {
                let v = self.pi_val * k - self.m() * i as i64;
                if v < 0 {
                    return Err(Error::InvalidExtension(format!(
                        "element is not integral (term of valuation {v})"
                    )));
                }
                if (v as usize) < n {
                    out[v as usize] = c;
                }
            }
        }
        Ok(out)
    }

    /// Matrices of the Galois generators and of multiplication by `t` on
    /// `R'/m'^n`, columns indexed by the valuation basis.
    pub fn truncate_to_matrices(&self, n: usize) -> Result<TruncatedModule> {
        if n > self.precision {
            return Err(Error::PrecisionExhausted(format!(
                "truncation level {n} exceeds working precision {}",
                self.precision
            )));
        }
        let basis = self.valuation_basis(n);
        let k = &self.field;
        let t = self.t();
        let mut sigma = self.spec.is_wild().then(|| Matrix::zeros(n, n));
        let mut tau = (self.spec.tame_d > 1).then(|| Matrix::zeros(n, n));
        let mut t_mult = Matrix::zeros(n, n);
        for (col, &(a, i)) in basis.iter().enumerate() {
            let b = self.monomial(1, a, i);
            let fill = |m: &mut Matrix, img: &ExtElem| -> Result<()> {
                for (row, c) in self.coordinates(img, n)?.into_iter().enumerate() {
                    m.set(row, col, c);
                }
                Ok(())
            };
            if let Some(ms) = sigma.as_mut() {
                fill(ms, &self.sigma_power(1, &b)?)?;
            }
            if let Some(mt) = tau.as_mut() {
                fill(mt, &self.tau_power(1, &b))?;
            }
            fill(&mut t_mult, &self.mul(&t, &b)?)?;
        }
        debug_assert!(sigma.iter().chain(&tau).all(|m| m.rows() == n));
        let _ = k;
        Ok(TruncatedModule {
            field: Arc::clone(&self.field),
            level: n,
            basis,
            p: self.spec.wild_order(),
            d: self.spec.tame_d,
            conj: self.conj,
            sigma,
            tau,
            t_mult,
        })
    }

    /// `Σ a_i(π)·y^i + O(ν ≥ N)`.
    pub fn render(&self, x: &ExtElem) -> String {
        let var = self.variable();
        let mut parts = Vec::new();
        for (i, a) in x.coords.iter().enumerate() {
            let terms = a.known_terms(var);
            if terms.is_empty() {
                continue;
            }
            let body = terms.join(" + ");
            parts.push(match (i, self.width()) {
                (_, 1) => body,
                (0, _) => format!("({body})"),
                (1, _) => format!("({body})·y"),
                _ => format!("({body})·y^{i}"),
            });
        }
        let mut out = if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        };
        if let Some(n) = self.element_precision(x) {
            out.push_str(&format!(" + O(ν ≥ {n})"));
        }
        out
    }
}

fn pow_mod(b: u64, e: u64, p: u64) -> u64 {
    (0..e).fold(1, |acc, _| acc * b % p)
}

/// Truncated module `R'/m'^n` with the Galois and `t` actions.
#[derive(Debug, Clone)]
pub struct TruncatedModule {
    pub field: Arc<FieldCtx>,
    pub level: usize,
    /// `(a, i)` of the monomial with valuation equal to the index.
    pub basis: Vec<(i64, usize)>,
    /// Order of the wild generator (1 if absent).
    pub p: u64,
    /// Order of the tame generator.
    pub d: u64,
    /// `τστ⁻¹ = σ^conj`.
    pub conj: u64,
    pub sigma: Option<Matrix>,
    pub tau: Option<Matrix>,
    pub t_mult: Matrix,
}

impl TruncatedModule {
    /// Identity for an absent generator.
    pub fn sigma_matrix(&self) -> Matrix {
        self.sigma
            .clone()
            .unwrap_or_else(|| Matrix::identity(self.level))
    }

    pub fn tau_matrix(&self) -> Matrix {
        self.tau
            .clone()
            .unwrap_or_else(|| Matrix::identity(self.level))
    }

    /// The same module cut down to `R'/m'^n`, `n ≤ level`. Valid because
    /// every action preserves the valuation filtration.
    pub fn restrict(&self, n: usize) -> TruncatedModule {
        assert!(n <= self.level);
        TruncatedModule {
            field: Arc::clone(&self.field),
            level: n,
            basis: self.basis[..n].to_vec(),
            p: self.p,
            d: self.d,
            conj: self.conj,
            sigma: self.sigma.as_ref().map(|m| m.leading_block(n)),
            tau: self.tau.as_ref().map(|m| m.leading_block(n)),
            t_mult: self.t_mult.leading_block(n),
        }
    }
}

/// Lower ramification breaks of a cyclic wild group of order `p^n` and
/// the tabulated function `i(l)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamificationProfile {
    pub p: u64,
    pub n: u32,
    pub tame_d: u64,
    pub breaks: Vec<u64>,
    /// `i_table[l - 1] = i(l)` for `l ∈ [1, p^n)`.
    pub i_table: Vec<u64>,
}

pub(crate) fn p_adic_valuation(mut l: u64, p: u64) -> u32 {
    let mut v = 0;
    while l.is_multiple_of(p) {
        l /= p;
        v += 1;
    }
    v
}

impl RamificationProfile {
    pub fn new(p: u64, n: u32, tame_d: u64, breaks: Vec<u64>, i_table: Vec<u64>) -> Result<Self> {
        let prof = Self {
            p,
            n,
            tame_d,
            breaks,
            i_table,
        };
        prof.check()?;
        Ok(prof)
    }

    pub fn i(&self, l: u64) -> u64 {
        self.i_table[(l - 1) as usize]
    }

    /// Checks `i(l) = b_{v_p(l)+1}` and `i ≥ 1`.
    pub fn check(&self) -> Result<()> {
        let order = self.p.pow(self.n);
        if self.i_table.len() as u64 != order - 1 || self.breaks.len() != self.n as usize {
            return Err(Error::MalformedBreaks(format!(
                "{} breaks and {} table entries for a group of order {order}",
                self.breaks.len(),
                self.i_table.len()
            )));
        }
        if self.breaks.windows(2).any(|w| w[0] >= w[1]) || self.breaks.first() == Some(&0) {
            return Err(Error::MalformedBreaks(format!("{:?}", self.breaks)));
        }
        for l in 1..order {
            let expect = self.breaks[p_adic_valuation(l, self.p) as usize];
            if self.i(l) != expect {
                return Err(Error::MalformedBreaks(format!(
                    "i({l}) = {} but the break for v_p(l) is {expect}",
                    self.i(l)
                )));
            }
        }
        Ok(())
    }

    /// Orders `|G_j|` of the wild ramification groups for `j = 1..=b_n+1`.
    pub fn wild_group_orders(&self) -> Vec<u64> {
        let last = *self.breaks.last().unwrap_or(&0);
        (1..=last + 1)
            .map(|j| {
                let survivors = self.breaks.iter().filter(|&&b| b >= j).count() as u32;
                self.p.pow(survivors)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ext(p: u64, d: u64, m: Option<u64>) -> LocalExtension {
        build_extension(ExtensionSpec::new(p, d, m).unwrap()).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(ExtensionSpec::new(4, 1, Some(1)).is_err());
        assert!(ExtensionSpec::new(3, 3, Some(1)).is_err());
        assert!(ExtensionSpec::new(3, 1, Some(6)).is_err());
        assert!(ExtensionSpec::new(3, 1, None).is_err());
        assert!(ExtensionSpec::new(3, 2, None).is_ok());
    }

    #[test]
    fn uniformizers() {
        let e = ext(2, 1, Some(1));
        assert_eq!(e.valuation(&e.t()), Order::Finite(2));
        assert_eq!(e.valuation(&e.y().unwrap()), Order::Finite(-1));
        assert_eq!(e.uniformizer_exponents(), (1, 1));
        assert_eq!(e.valuation(&e.uniformizer()), Order::Finite(1));

        let e = ext(3, 1, Some(4));
        assert_eq!(e.valuation(&e.t()), Order::Finite(3));
        assert_eq!(e.valuation(&e.y().unwrap()), Order::Finite(-4));
        assert_eq!(e.uniformizer_exponents(), (3, 2));
        assert_eq!(e.valuation(&e.uniformizer()), Order::Finite(1));

        let e = ext(7, 3, None);
        assert_eq!(e.uniformizer_exponents(), (1, 0));
        assert_eq!(e.valuation(&e.t()), Order::Finite(3));
        assert_eq!(e.valuation(&e.uniformizer()), Order::Finite(1));
    }

    #[test]
    fn defining_relation_and_y_inverse() {
        for (p, m) in [(2, 1), (3, 4), (5, 7)] {
            let e = ext(p, 1, Some(m));
            let y = e.y().unwrap();
            let lhs = e.sub(&e.pow(&y, p as u32).unwrap(), &y).unwrap();
            assert_eq!(lhs, e.monomial(1, -(m as i64), 0));
            let prod = e.mul(&y, &e.y_inverse().unwrap()).unwrap();
            assert_eq!(prod, e.one());
        }
    }

    #[test]
    fn galois_generators() {
        let e = ext(2, 1, Some(1));
        let y = e.y().unwrap();
        assert_eq!(
            e.apply_generator(Generator::Sigma, &y).unwrap(),
            e.add(&y, &e.one()).unwrap()
        );
        let u = e.uniformizer();
        let su = e.apply_generator(Generator::Sigma, &u).unwrap();
        assert_eq!(su, e.add(&u, &e.t()).unwrap());

        let e = ext(7, 3, None);
        let s = e.pi();
        for j in 1..3 {
            assert_ne!(e.tau_power(j, &s), s);
        }
        assert_eq!(e.apply_galois(&GaloisWord::sigma_tau(0, 3), &s).unwrap(), s);
    }

    #[test]
    fn compositum_is_galois_only_when_zeta_power_is_rational() {
        // p = 2, d = 3: zeta^m must be 1
        assert!(matches!(
            build_extension(ExtensionSpec::new(2, 3, Some(1)).unwrap()),
            Err(Error::NotGalois { .. })
        ));
        let e = ext(2, 3, Some(3));
        assert_eq!(e.conjugation_exponent(), 1);
        // p = 3, d = 2: zeta = -1, odd m gives tau(y) = -y and r = 2
        let e = ext(3, 2, Some(1));
        assert_eq!(e.conjugation_exponent(), 2);
        let e = ext(3, 2, Some(2));
        assert_eq!(e.conjugation_exponent(), 1);
    }

    #[test]
    fn generators_are_ring_automorphisms_fixing_k() {
        for (p, d, m) in [(3, 2, 1), (3, 2, 4), (2, 3, 3), (5, 2, 3), (5, 4, 2)] {
            let e = ext(p, d, Some(m));
            let y = e.y().unwrap();
            let rel = e.sub(&e.pow(&y, p as u32).unwrap(), &y).unwrap();
            for g in [Generator::Sigma, Generator::Tau] {
                let gy = e.apply_generator(g, &y).unwrap();
                let grel = e.sub(&e.pow(&gy, p as u32).unwrap(), &gy).unwrap();
                assert_eq!(grel, e.apply_generator(g, &rel).unwrap());
                assert_eq!(e.apply_generator(g, &e.t()).unwrap(), e.t());
            }
            let x = e.add(&e.uniformizer(), &e.monomial(2, -1, 1)).unwrap();
            let z = e.mul(&x, &e.pi()).unwrap();
            let lhs = e.apply_generator(Generator::Tau, &e.mul(&x, &z).unwrap()).unwrap();
            let rhs = e
                .mul(
                    &e.apply_generator(Generator::Tau, &x).unwrap(),
                    &e.apply_generator(Generator::Tau, &z).unwrap(),
                )
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn group_relations_on_elements() {
        for (p, d, m) in [(3, 2, 1), (3, 2, 2), (2, 3, 3), (5, 2, 1), (5, 4, 3)] {
            let e = ext(p, d, Some(m));
            let x = e
                .add(&e.uniformizer(), &e.monomial(1, 3, p as usize - 1))
                .unwrap();
            assert_eq!(e.sigma_power(p, &x).unwrap(), x);
            assert_eq!(e.tau_power(d, &x), x);
            // τ σ τ^{-1} = σ^r
            let r = e.conjugation_exponent();
            let lhs = e.tau_power(1, &e.sigma_power(1, &e.tau_power(d - 1, &x)).unwrap());
            assert_eq!(lhs, e.sigma_power(r, &x).unwrap());
        }
    }

    #[test]
    fn ramification_profiles() {
        assert_eq!(ext(3, 1, Some(4)).ramification_profile().unwrap().i_table, vec![4, 4]);
        assert_eq!(ext(2, 1, Some(1)).ramification_profile().unwrap().i_table, vec![1]);
        let prof = ext(5, 1, Some(3)).ramification_profile().unwrap();
        assert_eq!(prof.i_table, vec![3; 4]);
        assert_eq!(prof.breaks, vec![3]);
        let prof = ext(3, 2, Some(5)).ramification_profile().unwrap();
        assert_eq!(prof.breaks, vec![5]);
        assert!(ext(7, 3, None).ramification_profile().is_err());
    }

    #[test]
    fn ramification_groups_filtration() {
        let e = ext(3, 2, Some(4));
        let groups = e.lower_ramification_groups().unwrap();
        // G_0 = G, G_1 = ... = G_4 = <σ>, G_5 = 1
        assert_eq!(groups[0].len(), 6);
        for g in &groups[1..=4] {
            assert_eq!(g.len(), 3);
        }
        assert_eq!(groups[5], vec![(0, 0)]);
        assert_eq!(groups.len(), 6);
    }

    #[test]
    fn different_exponent_matches_index_sum() {
        let e = ext(3, 1, Some(4));
        assert_eq!(e.different_exponent().unwrap(), 2 * 5);
        let e = ext(3, 2, Some(1));
        // three tame elements with index 1, two wild ones with index m+1
        assert_eq!(e.different_exponent().unwrap(), 3 + 2 * 2);
    }

    #[test]
    fn precision_exhaustion_is_reported() {
        let e = ext(3, 1, Some(4));
        let u = e.truncate(&e.uniformizer(), 4);
        let diff = e.sub(&e.sigma_power(1, &u).unwrap(), &u).unwrap();
        assert!(matches!(e.valuation(&diff), Order::AtLeast(_)));
        assert!(matches!(
            LocalExtension::build(*e.spec(), 3),
            Err(Error::PrecisionBelowFloor { .. })
        ));
    }

    #[test]
    fn truncated_matrices() {
        let e = ext(2, 1, Some(1));
        let tm = e.truncate_to_matrices(4).unwrap();
        let sigma = tm.sigma.as_ref().unwrap();
        // σ fixes 1 = basis vector of valuation 0
        assert_eq!(sigma.column(0), vec![1, 0, 0, 0]);
        // σ(u') - u' = t has valuation 2 = i(1) + 1
        let mut col = sigma.column(1);
        col[1] = e.field().sub(col[1], 1);
        assert_eq!(col.iter().position(|&c| c != 0), Some(2));
        // t shifts valuation by e = 2
        for v in 0..4 {
            let c = tm.t_mult.column(v);
            if v + 2 < 4 {
                assert_eq!(c.iter().position(|&x| x != 0), Some(v + 2));
            } else {
                assert!(c.iter().all(|&x| x == 0));
            }
        }
    }

    #[test]
    fn render_elements() {
        let e = ext(3, 1, Some(4));
        assert_eq!(e.render(&e.uniformizer()), "(t^3)·y^2");
        let x = e.truncate(&e.add(&e.one(), &e.y().unwrap()).unwrap(), 6);
        assert_eq!(e.render(&x), "(1) + (1)·y + O(ν ≥ 6)");
    }
}
