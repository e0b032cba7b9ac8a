//! `H^1(G, R')` by linear algebra over `k`.
//!
//! A cocycle is determined by its values on the generators of `G`. Walking
//! the Cayley graph from the identity expresses `c(g)` for every `g` as a
//! linear function of those values (`c(gs) = c(g) + g·c(s)`); every edge
//! that closes a cycle yields a linear condition. The kernel is `Z^1`.
//!
//! Working modulo `m'^N` alone is not enough: `H^1(G, R'/m'^N)` picks up
//! classes that do not lift to `R'`. The oracle therefore solves the
//! cocycle condition modulo `m'^K` for a lift level `K > N` and keeps only
//! the image in `(R'/m'^N)^{gens}`. Once `N` exceeds the exponent of
//! `H^1(G, R')` and `K - N` exceeds the defect caused by the different,
//! this image modulo `B^1` is `H^1(G, R')` itself.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::ext::{LocalExtension, TruncatedModule};
use crate::field::FieldCtx;
use crate::group::{pow_mod, GroupTable};
use crate::linalg::{nilpotent_partition, Matrix, RowSpace};

/// Default bound on the number of unknowns of a single linear system.
pub const DEFAULT_MAX_DIM: usize = 5000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyResult {
    pub dim_z1: usize,
    pub dim_b1: usize,
    pub dim_h1: usize,
    /// Action of `t` in the computed basis of `H^1`.
    pub t_action: Matrix,
    /// Invariant-factor lengths, descending.
    pub partition: Vec<usize>,
    /// Truncation level `N` of the reported classes.
    pub level: usize,
    /// Level `K ≥ N` at which the cocycle condition was solved.
    pub lift_level: usize,
}

impl CohomologyResult {
    fn zero(level: usize, lift_level: usize) -> Self {
        Self {
            dim_z1: 0,
            dim_b1: 0,
            dim_h1: 0,
            t_action: Matrix::zeros(0, 0),
            partition: Vec::new(),
            level,
            lift_level,
        }
    }
}

/// Which solver computes each level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Method {
    /// Full cocycle system over the Cayley graph of `G`.
    #[default]
    Cocycle,
    /// `ker(N_g) / im(g - 1)` for a generator `g` of a cyclic `G`.
    Cyclic,
    /// `H^1(G_1, R')^{G/G_1}`.
    Subgroup,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_dim: usize,
    /// Highest level `N` tried before giving up; default `N_0 + 12e`.
    pub max_level: Option<usize>,
    /// Fail instead of raising the working precision of the extension.
    pub fixed_precision: bool,
    /// Number of consecutive equal partitions required.
    pub window: usize,
    pub method: Method,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            max_dim: DEFAULT_MAX_DIM,
            max_level: None,
            fixed_precision: false,
            window: 3,
            method: Method::Cocycle,
        }
    }
}

/// Cocycle values on all of `G` as linear functions of the generator
/// values, plus the relations they satisfy.
#[derive(Debug, Clone)]
pub struct CocycleSystem {
    level: usize,
    unknowns: usize,
    /// `c(g) = coeff[g] · x`, a `level × unknowns` matrix per element.
    coeff: Vec<Matrix>,
    action: Vec<Matrix>,
    relations: RowSpace,
}

impl CocycleSystem {
    pub fn build(
        ctx: &FieldCtx,
        group: &GroupTable,
        module: &TruncatedModule,
        max_dim: usize,
    ) -> Result<Self> {
        let k = module.level;
        let gens = group.generator_matrices(module);
        let unknowns = gens.len() * k;
        if unknowns > max_dim {
            return Err(Error::DimensionOverflow {
                dim: unknowns,
                bound: max_dim,
            });
        }
        let n = group.order();
        let mut coeff: Vec<Option<Matrix>> = vec![None; n];
        let mut action: Vec<Option<Matrix>> = vec![None; n];
        coeff[0] = Some(Matrix::zeros(k, unknowns));
        action[0] = Some(Matrix::identity(k));
        let mut relations = RowSpace::new(unknowns);
        let mut queue = VecDeque::from([0usize]);
        while let Some(g) = queue.pop_front() {
            for (slot, (&(_, s), ms)) in group.generators().iter().zip(&gens).enumerate() {
                let h = group.mul(g, s);
                let mg = action[g].as_ref().expect("visited");
                let mut c = coeff[g].clone().expect("visited");
                for r in 0..k {
                    let row = c.row_mut(r);
                    for col in 0..k {
                        let v = mg.get(r, col);
                        if v != 0 {
                            let at = slot * k + col;
                            row[at] = ctx.add(row[at], v);
                        }
                    }
                }
                match &coeff[h] {
                    None => {
                        action[h] = Some(mg.mul(ctx, ms));
                        coeff[h] = Some(c);
                        queue.push_back(h);
                    }
                    Some(existing) => {
                        let diff = c.sub(ctx, existing);
                        for r in 0..k {
                            let row = diff.row(r);
                            if row.iter().any(|&x| x != 0) {
                                relations.insert(ctx, row.to_vec());
                            }
                        }
                    }
                }
            }
        }
        Ok(Self {
            level: k,
            unknowns,
            coeff: coeff.into_iter().map(|c| c.expect("G is generated")).collect(),
            action: action.into_iter().map(|a| a.expect("G is generated")).collect(),
            relations,
        })
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Basis of `Z^1(G, R'/m'^K)` in generator coordinates.
    pub fn cocycles(&self, ctx: &FieldCtx) -> Vec<Vec<u32>> {
        self.relations.kernel(ctx)
    }

    /// Values `c(g)` for every element of `G`.
    pub fn values(&self, ctx: &FieldCtx, x: &[u32]) -> Vec<Vec<u32>> {
        self.coeff.iter().map(|c| c.mul_vec(ctx, x)).collect()
    }

    /// Matrix of each group element on `R'/m'^K`.
    pub fn action(&self) -> &[Matrix] {
        &self.action
    }
}

/// Keeps the first `n` coordinates of each of the `blocks` blocks of size
/// `k`.
fn project(v: &[u32], blocks: usize, k: usize, n: usize) -> Vec<u32> {
    (0..blocks)
        .flat_map(|b| v[b * k..b * k + n].iter().copied())
        .collect()
}

/// `(g·x - x)_g` over the given generator matrices, for each basis vector.
fn coboundaries(ctx: &FieldCtx, gens: &[Matrix], n: usize) -> RowSpace {
    let mut space = RowSpace::new(gens.len() * n);
    for v in 0..n {
        let mut row = Vec::with_capacity(gens.len() * n);
        for g in gens {
            let mut col = g.column(v);
            col[v] = ctx.sub(col[v], 1);
            row.extend(col);
        }
        space.insert(ctx, row);
    }
    space
}

/// A subquotient `W / B` with the `t`-action.
struct Quotient {
    b: RowSpace,
    h: RowSpace,
    dim_w: usize,
}

impl Quotient {
    fn new(ctx: &FieldCtx, b: RowSpace, w: impl IntoIterator<Item = Vec<u32>>) -> Self {
        let mut span = b.clone();
        let mut h = RowSpace::new(b.cols());
        for mut v in w {
            if span.insert(ctx, v.clone()) {
                b.reduce(ctx, &mut v);
                h.insert(ctx, v);
            }
        }
        Self {
            dim_w: span.rank(),
            b,
            h,
        }
    }

    /// Coordinates of the class of `v` in the basis of `h`.
    fn coords(&self, ctx: &FieldCtx, mut v: Vec<u32>) -> Result<Vec<u32>> {
        self.b.reduce(ctx, &mut v);
        let c = self.h.reduce(ctx, &mut v);
        if v.iter().any(|&x| x != 0) {
            return Err(Error::GroupRelation(
                "subspace of cocycles is not stable under the action".into(),
            ));
        }
        Ok(c)
    }

    /// Matrix of a blockwise linear map `f` on the quotient.
    fn induced(&self, ctx: &FieldCtx, f: impl Fn(&[u32]) -> Vec<u32>) -> Result<Matrix> {
        let dim = self.h.rank();
        let mut m = Matrix::zeros(dim, dim);
        for (col, v) in self.h.basis().iter().enumerate() {
            for (row, c) in self.coords(ctx, f(v))?.into_iter().enumerate() {
                m.set(row, col, c);
            }
        }
        Ok(m)
    }
}

fn blockwise(ctx: &FieldCtx, m: &Matrix, v: &[u32]) -> Vec<u32> {
    let n = m.cols();
    v.chunks(n).flat_map(|c| m.mul_vec(ctx, c)).collect()
}

fn finish(
    ctx: &FieldCtx,
    q: &Quotient,
    t_mult: &Matrix,
    level: usize,
    lift_level: usize,
) -> Result<CohomologyResult> {
    let t_action = q.induced(ctx, |v| blockwise(ctx, t_mult, v))?;
    let partition = nilpotent_partition(ctx, &t_action)
        .ok_or_else(|| Error::GroupRelation("t does not act nilpotently on H^1".into()))?;
    Ok(CohomologyResult {
        dim_z1: q.dim_w,
        dim_b1: q.b.rank(),
        dim_h1: q.h.rank(),
        t_action,
        partition,
        level,
        lift_level,
    })
}

fn check_level(module: &TruncatedModule, level: usize) -> Result<()> {
    if level > module.level {
        return Err(Error::PrecisionExhausted(format!(
            "level {level} above the module truncation {}",
            module.level
        )));
    }
    Ok(())
}

/// Classes of cocycles modulo `m'^K` (`K = module.level`) restricted to
/// `m'^level`, modulo coboundaries, via the full cocycle system.
pub fn h1_cocycle(
    ctx: &FieldCtx,
    group: &GroupTable,
    module: &TruncatedModule,
    level: usize,
    max_dim: usize,
) -> Result<CohomologyResult> {
    check_level(module, level)?;
    let k = module.level;
    let ng = group.generators().len();
    if ng == 0 {
        return Ok(CohomologyResult::zero(level, k));
    }
    let system = CocycleSystem::build(ctx, group, module, max_dim)?;
    let low = module.restrict(level);
    let b = coboundaries(ctx, &group.generator_matrices(&low), level);
    let w = system
        .cocycles(ctx)
        .into_iter()
        .map(|z| project(&z, ng, k, level));
    let q = Quotient::new(ctx, b, w);
    finish(ctx, &q, &low.t_mult, level, k)
}

fn norm(ctx: &FieldCtx, g: &Matrix, order: u64) -> Matrix {
    let mut acc = Matrix::zeros(g.rows(), g.cols());
    let mut power = Matrix::identity(g.rows());
    for _ in 0..order {
        acc = acc.add(ctx, &power);
        power = power.mul(ctx, g);
    }
    acc
}

/// A generator of `G` when `G` is cyclic, with its order.
pub fn cyclic_generator(
    ctx: &FieldCtx,
    group: &GroupTable,
    module: &TruncatedModule,
) -> Option<(Matrix, u64)> {
    if !group.is_abelian() {
        return None;
    }
    let mats = group.generator_matrices(module);
    let g = mats
        .iter()
        .fold(Matrix::identity(module.level), |acc, m| acc.mul(ctx, m));
    Some((g, group.order() as u64))
}

/// `ker(N_g) / im(g - 1)` with the same lifting as [`h1_cocycle`].
pub fn h1_cyclic(
    ctx: &FieldCtx,
    group: &GroupTable,
    module: &TruncatedModule,
    level: usize,
    max_dim: usize,
) -> Result<CohomologyResult> {
    check_level(module, level)?;
    let k = module.level;
    if group.order() == 1 {
        return Ok(CohomologyResult::zero(level, k));
    }
    if k > max_dim {
        return Err(Error::DimensionOverflow {
            dim: k,
            bound: max_dim,
        });
    }
    let (g, order) = cyclic_generator(ctx, group, module)
        .ok_or_else(|| Error::GroupRelation("group is not cyclic".into()))?;
    let low = module.restrict(level);
    let q = cyclic_quotient(ctx, &g, order, level)?;
    finish(ctx, &q, &low.t_mult, level, k)
}

fn cyclic_quotient(ctx: &FieldCtx, g: &Matrix, order: u64, level: usize) -> Result<Quotient> {
    let k = g.rows();
    let nm = norm(ctx, g, order);
    let mut rel = RowSpace::new(k);
    for r in 0..k {
        rel.insert(ctx, nm.row(r).to_vec());
    }
    let b = coboundaries(ctx, &[g.leading_block(level)], level);
    let w = rel.kernel(ctx).into_iter().map(|z| z[..level].to_vec());
    Ok(Quotient::new(ctx, b, w))
}

/// `H^1(⟨σ⟩, R')` with the induced action of `τ`, restricted to the
/// `τ`-invariant classes.
///
/// `τ` acts on a class through its value `a = c(σ)` by
/// `a ↦ τ · c(τ⁻¹στ) = τ · (1 + σ + … + σ^{k-1}) a` where `τ⁻¹στ = σ^k`.
pub fn h1_invariants_of_subgroup(
    ctx: &FieldCtx,
    group: &GroupTable,
    module: &TruncatedModule,
    level: usize,
    max_dim: usize,
) -> Result<CohomologyResult> {
    check_level(module, level)?;
    let k = module.level;
    let p = group.wild_order();
    if p == 1 {
        return Ok(CohomologyResult::zero(level, k));
    }
    if k > max_dim {
        return Err(Error::DimensionOverflow {
            dim: k,
            bound: max_dim,
        });
    }
    let sigma = module.sigma_matrix();
    let q = cyclic_quotient(ctx, &sigma, p, level)?;
    let low = module.restrict(level);
    let t_full = q.induced(ctx, |v| low.t_mult.mul_vec(ctx, v))?;
    let dim_h = q.h.rank();

    let r = group.conjugation_exponent();
    let kk = pow_mod(r, p - 2, p);
    debug_assert_eq!(r * kk % p, 1);
    let s_low = low.sigma_matrix();
    let a = low.tau_matrix().mul(ctx, &norm(ctx, &s_low, kk));
    let mut a_minus = q.induced(ctx, |v| a.mul_vec(ctx, v))?;
    for i in 0..dim_h {
        a_minus.set(i, i, ctx.sub(a_minus.get(i, i), 1));
    }
    let mut rows = RowSpace::new(dim_h);
    for i in 0..dim_h {
        rows.insert(ctx, a_minus.row(i).to_vec());
    }
    let mut inv = RowSpace::new(dim_h);
    for v in rows.kernel(ctx) {
        inv.insert(ctx, v);
    }
    let dim = inv.rank();
    let mut t_action = Matrix::zeros(dim, dim);
    for (col, v) in inv.basis().iter().enumerate() {
        let mut img = t_full.mul_vec(ctx, v);
        let c = inv.reduce(ctx, &mut img);
        if img.iter().any(|&x| x != 0) {
            return Err(Error::GroupRelation(
                "invariant classes are not stable under t".into(),
            ));
        }
        for (row, x) in c.into_iter().enumerate() {
            t_action.set(row, col, x);
        }
    }
    let partition = nilpotent_partition(ctx, &t_action)
        .ok_or_else(|| Error::GroupRelation("t does not act nilpotently on H^1".into()))?;
    Ok(CohomologyResult {
        dim_z1: q.b.rank() + dim,
        dim_b1: q.b.rank(),
        dim_h1: dim,
        t_action,
        partition,
        level,
        lift_level: k,
    })
}

/// Runs the chosen method at one truncation level.
pub fn h1_with_method(
    method: Method,
    ctx: &FieldCtx,
    group: &GroupTable,
    module: &TruncatedModule,
    level: usize,
    max_dim: usize,
) -> Result<CohomologyResult> {
    match method {
        Method::Cocycle => h1_cocycle(ctx, group, module, level, max_dim),
        Method::Cyclic => h1_cyclic(ctx, group, module, level, max_dim),
        Method::Subgroup => h1_invariants_of_subgroup(ctx, group, module, level, max_dim),
    }
}

/// First level tried by [`stabilized_h1`]: `e·(⌊m/p⌋ + 2)`.
pub fn oracle_start_level(ext: &LocalExtension) -> usize {
    let spec = ext.spec();
    let e = spec.ramification_index() as usize;
    match spec.as_m {
        Some(m) => e * ((m / spec.p) as usize + 2),
        None => 2 * e,
    }
}

/// `K - N`: the different exponent plus `2e`.
pub fn lift_margin(ext: &LocalExtension) -> Result<usize> {
    let delta = ext.different_exponent()?;
    Ok((delta + 2 * ext.ramification_index()) as usize)
}

/// Computes levels on demand, growing the module as needed.
pub struct Oracle<'a> {
    ext: LocalExtension,
    config: &'a OracleConfig,
    group: GroupTable,
    margin: usize,
    module: Option<TruncatedModule>,
}

impl<'a> Oracle<'a> {
    pub fn new(ext: &LocalExtension, config: &'a OracleConfig) -> Result<Self> {
        let margin = lift_margin(ext)?;
        let group = GroupTable::new(
            ext.spec().wild_order(),
            ext.spec().tame_d,
            ext.conjugation_exponent(),
        )?;
        Ok(Self {
            ext: ext.clone(),
            config,
            group,
            margin,
            module: None,
        })
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    fn module_at(&mut self, k: usize) -> Result<TruncatedModule> {
        if let Some(m) = &self.module {
            if m.level >= k {
                return Ok(m.restrict(k));
            }
        }
        let e = self.ext.ramification_index() as usize;
        if k > self.ext.precision() {
            if self.config.fixed_precision {
                return Err(Error::PrecisionExhausted(format!(
                    "lift level {k} exceeds the fixed working precision {}",
                    self.ext.precision()
                )));
            }
            self.ext = self.ext.with_precision(k + 4 * e)?;
        }
        let target = (k + 4 * e).min(self.ext.precision());
        let module = self.ext.truncate_to_matrices(target)?;
        self.group.check_module(self.ext.field(), &module)?;
        let out = module.restrict(k);
        self.module = Some(module);
        Ok(out)
    }

    /// `H^1` classes at level `n`, lifted from `n + margin`.
    pub fn level(&mut self, n: usize, method: Method) -> Result<CohomologyResult> {
        let module = self.module_at(n + self.margin)?;
        h1_with_method(
            method,
            self.ext.field(),
            &self.group,
            &module,
            n,
            self.config.max_dim,
        )
    }
}

/// One level of [`stabilized_h1`].
pub fn h1_at_level(
    ext: &LocalExtension,
    level: usize,
    config: &OracleConfig,
) -> Result<CohomologyResult> {
    Oracle::new(ext, config)?.level(level, config.method)
}

/// Stabilized result together with the partitions seen per level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stabilized {
    pub result: CohomologyResult,
    pub history: Vec<(usize, Vec<usize>)>,
}

/// Runs levels `N_0, N_0 + e, …` until `window` consecutive partitions
/// agree and returns the result at the first level of that run.
pub fn stabilized_h1(ext: &LocalExtension, config: &OracleConfig) -> Result<Stabilized> {
    let e = ext.ramification_index() as usize;
    let start = oracle_start_level(ext);
    let max_level = config.max_level.unwrap_or(start + 12 * e);
    let window = config.window.max(1);
    let mut oracle = Oracle::new(ext, config)?;
    let mut history: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut results: Vec<CohomologyResult> = Vec::new();
    let mut n = start;
    while n <= max_level {
        let r = oracle.level(n, config.method)?;
        history.push((n, r.partition.clone()));
        results.push(r);
        let len = results.len();
        if len >= window
            && results[len - window..]
                .iter()
                .all(|x| x.partition == results[len - 1].partition)
        {
            let result = results.swap_remove(len - window);
            return Ok(Stabilized { result, history });
        }
        n += e;
    }
    let history = history
        .iter()
        .map(|(n, p)| format!("N={n}:{p:?}"))
        .collect::<Vec<_>>()
        .join(" ");
    Err(Error::NoStabilization { max_level, history })
}
