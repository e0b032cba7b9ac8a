//! The Galois group `G = ⟨σ⟩ ⋊ ⟨τ⟩` as an explicit multiplication table.

use crate::error::{Error, Result};
use crate::ext::TruncatedModule;
use crate::field::FieldCtx;
use crate::linalg::Matrix;

/// Element `σ^l τ^j`.
pub type GroupElem = (u64, u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenKind {
    Sigma,
    Tau,
}

/// Finite group of pairs `(l, j)`, `0 ≤ l < p`, `0 ≤ j < d`, with
/// `(l1, j1)(l2, j2) = (l1 + r^{j1} l2, j1 + j2)`.
#[derive(Debug, Clone)]
pub struct GroupTable {
    p: u64,
    d: u64,
    conj: u64,
    elements: Vec<GroupElem>,
    table: Vec<usize>,
    generators: Vec<(GenKind, usize)>,
}

impl GroupTable {
    /// `p = 1` or `d = 1` drops the corresponding factor.
    pub fn new(p: u64, d: u64, conj: u64) -> Result<Self> {
        if p == 0 || d == 0 {
            return Err(Error::GroupRelation("factor of order zero".into()));
        }
        let conj = if p == 1 { 0 } else { conj % p };
        let elements: Vec<GroupElem> = (0..d)
            .flat_map(|j| (0..p).map(move |l| (l, j)))
            .collect();
        let n = elements.len();
        let index = |(l, j): GroupElem| (j * p + l) as usize;
        let mut table = vec![0; n * n];
        for (a, &(l1, j1)) in elements.iter().enumerate() {
            let twist = pow_mod(conj, j1, p);
            for (b, &(l2, j2)) in elements.iter().enumerate() {
                let prod = ((l1 + twist * l2) % p, (j1 + j2) % d);
                table[a * n + b] = index(prod);
            }
        }
        let mut generators = Vec::new();
        if p > 1 {
            generators.push((GenKind::Sigma, index((1, 0))));
        }
        if d > 1 {
            generators.push((GenKind::Tau, index((0, 1 % d))));
        }
        let g = Self {
            p,
            d,
            conj,
            elements,
            table,
            generators,
        };
        g.check()?;
        Ok(g)
    }

    /// The group acting on a truncated module.
    pub fn for_module(module: &TruncatedModule) -> Result<Self> {
        Self::new(module.p, module.d, module.conj)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn wild_order(&self) -> u64 {
        self.p
    }

    pub fn tame_order(&self) -> u64 {
        self.d
    }

    pub fn conjugation_exponent(&self) -> u64 {
        self.conj
    }

    pub fn elements(&self) -> &[GroupElem] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> GroupElem {
        self.elements[i]
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order())
            .find(|&b| self.mul(a, b) == 0)
            .expect("checked at construction")
    }

    /// Generator kinds and their element indices.
    pub fn generators(&self) -> &[(GenKind, usize)] {
        &self.generators
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    fn check(&self) -> Result<()> {
        let n = self.order();
        if self.p > 1 && pow_mod(self.conj, self.d, self.p) != 1 {
            return Err(Error::GroupRelation(format!(
                "conjugation exponent {} has order not dividing {}",
                self.conj, self.d
            )));
        }
        for a in 0..n {
            if self.mul(0, a) != a || self.mul(a, 0) != a {
                return Err(Error::GroupRelation("identity law fails".into()));
            }
            if !(0..n).any(|b| self.mul(a, b) == 0) {
                return Err(Error::GroupRelation(format!("{:?} has no inverse", self.elements[a])));
            }
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::GroupRelation("associativity fails".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Generator matrices in the order of [`Self::generators`].
    pub fn generator_matrices(&self, module: &TruncatedModule) -> Vec<Matrix> {
        self.generators
            .iter()
            .map(|(kind, _)| match kind {
                GenKind::Sigma => module.sigma_matrix(),
                GenKind::Tau => module.tau_matrix(),
            })
            .collect()
    }

    /// Matrix of every element, indexed like [`Self::elements`].
    pub fn action_matrices(&self, ctx: &FieldCtx, module: &TruncatedModule) -> Vec<Matrix> {
        let s = module.sigma_matrix();
        let t = module.tau_matrix();
        let s_pows: Vec<Matrix> = std::iter::successors(Some(Matrix::identity(module.level)), |m| {
            Some(m.mul(ctx, &s))
        })
        .take(self.p as usize)
        .collect();
        let t_pows: Vec<Matrix> = std::iter::successors(Some(Matrix::identity(module.level)), |m| {
            Some(m.mul(ctx, &t))
        })
        .take(self.d as usize)
        .collect();
        self.elements
            .iter()
            .map(|&(l, j)| s_pows[l as usize].mul(ctx, &t_pows[j as usize]))
            .collect()
    }

    /// Verifies that the matrices of a module satisfy the defining relations.
    pub fn check_module(&self, ctx: &FieldCtx, module: &TruncatedModule) -> Result<()> {
        let n = module.level;
        let id = Matrix::identity(n);
        let s = module.sigma_matrix();
        let t = module.tau_matrix();
        if s.pow(ctx, self.p) != id {
            return Err(Error::GroupRelation("sigma^p != 1 on the module".into()));
        }
        if t.pow(ctx, self.d) != id {
            return Err(Error::GroupRelation("tau^d != 1 on the module".into()));
        }
        let lhs = t.mul(ctx, &s);
        let rhs = s.pow(ctx, self.conj.max(1)).mul(ctx, &t);
        if self.p > 1 && lhs != rhs {
            return Err(Error::GroupRelation("tau sigma != sigma^r tau on the module".into()));
        }
        for g in [&s, &t] {
            if g.mul(ctx, &module.t_mult) != module.t_mult.mul(ctx, g) {
                return Err(Error::GroupRelation("generator does not commute with t".into()));
            }
        }
        Ok(())
    }
}

pub(crate) fn pow_mod(b: u64, e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1 % m;
    let mut b = b % m;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::{build_extension, ExtensionSpec};

    #[test]
    fn tables() {
        let g = GroupTable::new(3, 2, 2).unwrap();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        assert_eq!(g.generators().len(), 2);
        let g = GroupTable::new(3, 2, 1).unwrap();
        assert!(g.is_abelian());
        let g = GroupTable::new(1, 5, 0).unwrap();
        assert_eq!(g.generators(), &[(GenKind::Tau, 1)]);
        assert!(GroupTable::new(5, 2, 2).is_err());
    }

    #[test]
    fn inverses() {
        let g = GroupTable::new(5, 4, 2).unwrap();
        for a in 0..g.order() {
            assert_eq!(g.mul(a, g.inverse(a)), 0);
        }
    }

    #[test]
    fn module_relations() {
        for (p, d, m) in [(2, 1, 1), (3, 2, 1), (3, 2, 4), (2, 3, 3), (7, 3, 0)] {
            let spec = ExtensionSpec::new(p, d, (m > 0).then_some(m)).unwrap();
            let ext = build_extension(spec).unwrap();
            let module = ext.truncate_to_matrices(20).unwrap();
            let g = GroupTable::for_module(&module).unwrap();
            g.check_module(ext.field(), &module).unwrap();
            let mats = g.action_matrices(ext.field(), &module);
            for a in 0..g.order() {
                for b in 0..g.order() {
                    assert_eq!(
                        mats[a].mul(ext.field(), &mats[b]),
                        mats[g.mul(a, b)],
                        "{:?} {:?}",
                        g.element(a),
                        g.element(b)
                    );
                }
            }
        }
    }
}
