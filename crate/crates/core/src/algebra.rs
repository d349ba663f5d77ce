//! Finite-dimensional algebras given by structure constants, bimodules over
//! them, linear operators between the spaces involved, and the exact checks
//! that go with them (associativity, bimodule axioms, invariance of a pairing,
//! cyclicity of a cocycle).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_traits::Zero;

use crate::bigraded::SplitContext;
use crate::cochain::Cochain;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Dimension up to which structure constants are stored densely.
pub const DENSE_LIMIT: usize = 16;

/// Which space a linear operator reads from or writes to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    /// First summand of a split space.
    A1,
    /// Second summand of a split space.
    A2,
    /// An algebra `A`.
    Algebra,
    /// A bimodule `M`.
    Module,
    /// A whole (split) space.
    Total,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::A1 => "A1",
            Role::A2 => "A2",
            Role::Algebra => "A",
            Role::Module => "M",
            Role::Total => "T",
        }
    }

    pub fn parse(s: &str) -> Option<Role> {
        Some(match s {
            "A1" => Role::A1,
            "A2" => Role::A2,
            "A" => Role::Algebra,
            "M" => Role::Module,
            "T" => Role::Total,
            _ => return None,
        })
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A matrix acting on column vectors: `rows = dim(codomain)`, `cols = dim(domain)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearOp {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
    domain: Role,
    codomain: Role,
}

impl LinearOp {
    pub fn zero(rows: usize, cols: usize, domain: Role, codomain: Role) -> Self {
        LinearOp {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
            domain,
            codomain,
        }
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        domain: Role,
        codomain: Role,
        mut f: impl FnMut(usize, usize) -> Rational,
    ) -> Self {
        let mut op = LinearOp::zero(rows, cols, domain, codomain);
        for r in 0..rows {
            for c in 0..cols {
                op.entries[r * cols + c] = f(r, c);
            }
        }
        op
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>, domain: Role, codomain: Role) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(LinearOp {
            rows: n,
            cols: m,
            entries: rows.into_iter().flatten().collect(),
            domain,
            codomain,
        })
    }

    pub fn identity(n: usize, role: Role) -> Self {
        Self::scalar(n, &rational::one(), role, role)
    }

    /// `c · id` between two spaces of the same dimension.
    pub fn scalar(n: usize, c: &Rational, domain: Role, codomain: Role) -> Self {
        LinearOp::from_fn(n, n, domain, codomain, |r, k| {
            if r == k {
                c.clone()
            } else {
                Rational::zero()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn domain(&self) -> Role {
        self.domain
    }

    pub fn codomain(&self) -> Role {
        self.codomain
    }

    pub fn roles(&self) -> (Role, Role) {
        (self.domain, self.codomain)
    }

    pub fn with_roles(mut self, domain: Role, codomain: Role) -> Self {
        self.domain = domain;
        self.codomain = codomain;
        self
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols, "operator applied to a vector of wrong length");
        let mut out = vec![Rational::zero(); self.rows];
        for (c, xc) in x.iter().enumerate() {
            if xc.is_zero() {
                continue;
            }
            for (r, o) in out.iter_mut().enumerate() {
                let e = &self.entries[r * self.cols + c];
                if !e.is_zero() {
                    *o += e * xc;
                }
            }
        }
        out
    }

    /// Image of the `c`-th basis vector.
    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    /// `self ∘ other`; the domain of the result is `other`'s.
    pub fn compose(&self, other: &LinearOp) -> Result<LinearOp> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}x{} after {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = LinearOp::zero(self.rows, other.cols, other.domain, self.codomain);
        for c in 0..other.cols {
            let col = self.apply(&other.column(c));
            for (r, v) in col.into_iter().enumerate() {
                out.set(r, c, v);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Rational) -> LinearOp {
        LinearOp {
            entries: self.entries.iter().map(|e| e * s).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &LinearOp) -> Result<LinearOp> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("operator sum of different shapes".into()));
        }
        Ok(LinearOp {
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
            ..self.clone()
        })
    }

    pub fn transpose(&self) -> LinearOp {
        LinearOp::from_fn(self.cols, self.rows, self.codomain, self.domain, |r, c| {
            self.get(c, r).clone()
        })
    }

    pub fn is_symmetric(&self) -> Option<(usize, usize)> {
        if self.rows != self.cols {
            return Some((self.rows, self.cols));
        }
        for r in 0..self.rows {
            for c in r + 1..self.cols {
                if self.get(r, c) != self.get(c, r) {
                    return Some((r, c));
                }
            }
        }
        None
    }

    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<Rational>> = (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            let pivot = m[rank][col].clone();
            let (top, rest) = m.split_at_mut(rank + 1);
            let pivot_row = &top[rank];
            for row in rest.iter_mut() {
                if row[col].is_zero() {
                    continue;
                }
                let f = &row[col] / &pivot;
                for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= &f * p;
                }
            }
            rank += 1;
        }
        rank
    }

    /// The arity-1 cochain with the same matrix (square operators only).
    pub fn to_cochain(&self) -> Result<Cochain> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "a {}x{} operator is not an endomorphism",
                self.rows, self.cols
            )));
        }
        Cochain::from_fn(self.rows, 1, |out, ins| self.get(out, ins[0]).clone())
    }

    pub(crate) fn expect_roles(&self, expected: (Role, Role)) -> Result<()> {
        if self.roles() != expected {
            return Err(Error::role(expected, self.roles()));
        }
        Ok(())
    }

    pub(crate) fn expect_shape(&self, rows: usize, cols: usize, what: &str) -> Result<()> {
        if (self.rows, self.cols) != (rows, cols) {
            return Err(Error::DimensionMismatch(format!(
                "{what} must be {rows}x{cols}, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum StructureTable {
    /// `c[(i*d + j)*d + k]` is the coefficient of `e_k` in `e_i e_j`.
    Dense(Vec<Rational>),
    Sparse(BTreeMap<(usize, usize), Vec<(usize, Rational)>>),
}

/// A finite-dimensional algebra, not necessarily associative, over ℚ.
#[derive(Clone, Debug)]
pub struct Algebra {
    name: String,
    basis: Vec<String>,
    table: StructureTable,
    degrees: Option<Vec<u32>>,
    split: Option<usize>,
    associative: OnceLock<bool>,
}

impl PartialEq for Algebra {
    /// Two algebras are equal when their structure constants agree; names,
    /// labels and annotations are ignored.
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && (0..self.dim()).all(|i| (0..self.dim()).all(|j| self.mul_basis(i, j) == other.mul_basis(i, j)))
    }
}

impl Algebra {
    /// Builds an algebra from `(i, j, k, c)` meaning `e_i e_j ∋ c·e_k`.
    /// Repeated triples add up; omitted triples are zero.
    pub fn new(
        name: impl Into<String>,
        basis: Vec<String>,
        products: impl IntoIterator<Item = (usize, usize, usize, Rational)>,
    ) -> Result<Self> {
        let d = basis.len();
        let mut sparse: BTreeMap<(usize, usize), BTreeMap<usize, Rational>> = BTreeMap::new();
        for (i, j, k, c) in products {
            if i >= d || j >= d || k >= d {
                return Err(Error::DimensionMismatch(format!(
                    "product ({i}, {j}) -> {k} out of range for dimension {d}"
                )));
            }
            *sparse
                .entry((i, j))
                .or_default()
                .entry(k)
                .or_insert_with(Rational::zero) += c;
        }
        let table = if d <= DENSE_LIMIT {
            let mut dense = vec![Rational::zero(); d * d * d];
            for ((i, j), terms) in sparse {
                for (k, c) in terms {
                    dense[(i * d + j) * d + k] = c;
                }
            }
            StructureTable::Dense(dense)
        } else {
            StructureTable::Sparse(
                sparse
                    .into_iter()
                    .map(|(ij, terms)| (ij, terms.into_iter().filter(|(_, c)| !c.is_zero()).collect::<Vec<_>>()))
                    .filter(|(_, terms)| !terms.is_empty())
                    .collect(),
            )
        };
        Ok(Algebra {
            name: name.into(),
            basis,
            table,
            degrees: None,
            split: None,
            associative: OnceLock::new(),
        })
    }

    /// Basis labels default to `e0, e1, …`.
    pub fn from_cochain(name: impl Into<String>, mu: &Cochain) -> Result<Self> {
        if mu.arity() != 2 {
            return Err(Error::Precondition(format!(
                "a multiplication is an arity-2 cochain, got arity {}",
                mu.arity()
            )));
        }
        let basis = (0..mu.dim()).map(|i| format!("e{i}")).collect();
        let products = mu
            .nonzero_entries()
            .map(|(idx, c)| (idx[1], idx[2], idx[0], c.clone()))
            .collect::<Vec<_>>();
        Algebra::new(name, basis, products)
    }

    pub fn with_basis(mut self, basis: Vec<String>) -> Result<Self> {
        if basis.len() != self.dim() {
            return Err(Error::DimensionMismatch("basis label count".into()));
        }
        self.basis = basis;
        Ok(self)
    }

    pub fn with_degrees(mut self, degrees: Vec<u32>) -> Result<Self> {
        if degrees.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} degrees for dimension {}",
                degrees.len(),
                self.dim()
            )));
        }
        self.degrees = Some(degrees);
        Ok(self)
    }

    /// Records that the first `dim1` basis vectors span `A1`.
    pub fn with_split(mut self, dim1: usize) -> Result<Self> {
        if dim1 > self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "split dim1 = {dim1} exceeds dimension {}",
                self.dim()
            )));
        }
        self.split = Some(dim1);
        Ok(self)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis
    }

    pub fn degrees(&self) -> Option<&[u32]> {
        self.degrees.as_deref()
    }

    pub fn split(&self) -> Option<SplitContext> {
        self.split.map(|n1| SplitContext::new(n1, self.dim() - n1))
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.table, StructureTable::Dense(_))
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> Vec<Rational> {
        let d = self.dim();
        match &self.table {
            StructureTable::Dense(c) => c[(i * d + j) * d..(i * d + j + 1) * d].to_vec(),
            StructureTable::Sparse(map) => {
                let mut out = vec![Rational::zero(); d];
                if let Some(terms) = map.get(&(i, j)) {
                    for (k, c) in terms {
                        out[*k] = c.clone();
                    }
                }
                out
            }
        }
    }

    /// Coefficient of `e_k` in `e_i e_j`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Rational {
        let d = self.dim();
        match &self.table {
            StructureTable::Dense(c) => c[(i * d + j) * d + k].clone(),
            StructureTable::Sparse(map) => map
                .get(&(i, j))
                .and_then(|t| t.iter().find(|(kk, _)| *kk == k))
                .map_or_else(Rational::zero, |(_, c)| c.clone()),
        }
    }

    /// Nonzero structure constants as `(i, j, k, c)`.
    pub fn products(&self) -> Vec<(usize, usize, usize, Rational)> {
        let d = self.dim();
        match &self.table {
            StructureTable::Dense(c) => c
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(flat, v)| (flat / (d * d), (flat / d) % d, flat % d, v.clone()))
                .collect(),
            StructureTable::Sparse(map) => map
                .iter()
                .flat_map(|(&(i, j), terms)| terms.iter().map(move |(k, c)| (i, j, *k, c.clone())))
                .collect(),
        }
    }

    pub fn mul(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let d = self.dim();
        let mut out = vec![Rational::zero(); d];
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let s = xi * yj;
                match &self.table {
                    StructureTable::Dense(c) => {
                        for (k, o) in out.iter_mut().enumerate() {
                            let ck = &c[(i * d + j) * d + k];
                            if !ck.is_zero() {
                                *o += ck * &s;
                            }
                        }
                    }
                    StructureTable::Sparse(map) => {
                        if let Some(terms) = map.get(&(i, j)) {
                            for (k, ck) in terms {
                                out[*k] += ck * &s;
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// The multiplication as an arity-2 cochain.
    pub fn structure_cochain(&self) -> Cochain {
        let d = self.dim();
        let mut mu = Cochain::zero(d, 2).expect("arity 2");
        for (i, j, k, c) in self.products() {
            mu.set(k, &[i, j], c);
        }
        mu
    }

    /// Associativity, computed once and cached.
    pub fn is_associative(&self) -> bool {
        *self.associative.get_or_init(|| check_associativity(self).holds)
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Rational> {
        unit(self.dim(), i)
    }
}

pub(crate) fn unit(d: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); d];
    v[i] = rational::one();
    v
}

pub(crate) fn vec_add(a: &mut [Rational], b: &[Rational]) {
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x += y;
        }
    }
}

pub(crate) fn vec_sub(a: &mut [Rational], b: &[Rational]) {
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x -= y;
        }
    }
}

pub(crate) fn vec_scale(a: &[Rational], s: &Rational) -> Vec<Rational> {
    a.iter().map(|x| x * s).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssociativityWitness {
    pub triple: [usize; 3],
    /// `(e_i e_j) e_k`
    pub left: Vec<Rational>,
    /// `e_i (e_j e_k)`
    pub right: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssociativityReport {
    pub holds: bool,
    pub witness: Option<AssociativityWitness>,
}

/// Checks `(e_i e_j) e_k = e_i (e_j e_k)` on every basis triple, in
/// lexicographic order, stopping at the first failure.
pub fn check_associativity(alg: &Algebra) -> AssociativityReport {
    let d = alg.dim();
    for i in 0..d {
        for j in 0..d {
            let ij = alg.mul_basis(i, j);
            for k in 0..d {
                let left = alg.mul(&ij, &unit(d, k));
                let jk = alg.mul_basis(j, k);
                let right = alg.mul(&unit(d, i), &jk);
                if left != right {
                    return AssociativityReport {
                        holds: false,
                        witness: Some(AssociativityWitness {
                            triple: [i, j, k],
                            left,
                            right,
                        }),
                    };
                }
            }
        }
    }
    AssociativityReport {
        holds: true,
        witness: None,
    }
}

/// A bimodule `M` over an algebra `A`.
///
/// `left[(i*m + j)*m + k]` is the coefficient of `m_k` in `e_i · m_j`;
/// `right[(j*a + i)*m + k]` is the coefficient of `m_k` in `m_j · e_i`.
#[derive(Clone, Debug)]
pub struct Bimodule {
    algebra: Arc<Algebra>,
    dim: usize,
    left: Vec<Rational>,
    right: Vec<Rational>,
    degrees: Option<Vec<u32>>,
}

/// Entries `(algebra index, module index, module index, coefficient)`.
pub type ActionEntry = (usize, usize, usize, Rational);

impl Bimodule {
    /// `left` holds `(i, j, k, c)`: `e_i · m_j ∋ c·m_k`; `right` holds
    /// `(j, i, k, c)`: `m_j · e_i ∋ c·m_k`. The three bimodule axioms are
    /// verified exactly on all basis triples.
    pub fn new(
        algebra: Arc<Algebra>,
        dim: usize,
        left: impl IntoIterator<Item = ActionEntry>,
        right: impl IntoIterator<Item = ActionEntry>,
    ) -> Result<Self> {
        let module = Bimodule::unchecked(algebra, dim, left, right)?;
        module.verify_axioms()?;
        Ok(module)
    }

    fn unchecked(
        algebra: Arc<Algebra>,
        dim: usize,
        left: impl IntoIterator<Item = ActionEntry>,
        right: impl IntoIterator<Item = ActionEntry>,
    ) -> Result<Self> {
        let a = algebra.dim();
        let mut l = vec![Rational::zero(); a * dim * dim];
        let mut r = vec![Rational::zero(); dim * a * dim];
        for (i, j, k, c) in left {
            if i >= a || j >= dim || k >= dim {
                return Err(Error::DimensionMismatch(format!(
                    "left action entry ({i}, {j}, {k}) out of range"
                )));
            }
            l[(i * dim + j) * dim + k] += c;
        }
        for (j, i, k, c) in right {
            if i >= a || j >= dim || k >= dim {
                return Err(Error::DimensionMismatch(format!(
                    "right action entry ({j}, {i}, {k}) out of range"
                )));
            }
            r[(j * a + i) * dim + k] += c;
        }
        Ok(Bimodule {
            algebra,
            dim,
            left: l,
            right: r,
            degrees: None,
        })
    }

    /// `A` acting on itself by multiplication. The axioms are not checked:
    /// they reduce to associativity, and truncated models that fail it still
    /// need their regular module, restricted by degree filters like the
    /// algebra itself.
    pub fn canonical(algebra: Arc<Algebra>) -> Result<Self> {
        let d = algebra.dim();
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (i, j, k, c) in algebra.products() {
            left.push((i, j, k, c.clone()));
            right.push((i, j, k, c));
        }
        let degrees = algebra.degrees().map(<[u32]>::to_vec);
        let mut m = Bimodule::unchecked(algebra, d, left, right)?;
        m.degrees = degrees;
        Ok(m)
    }

    pub fn with_degrees(mut self, degrees: Vec<u32>) -> Result<Self> {
        if degrees.len() != self.dim {
            return Err(Error::DimensionMismatch("module degree count".into()));
        }
        self.degrees = Some(degrees);
        Ok(self)
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degrees(&self) -> Option<&[u32]> {
        self.degrees.as_deref()
    }

    pub fn left_coeff(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.left[(i * self.dim + j) * self.dim + k]
    }

    pub fn right_coeff(&self, j: usize, i: usize, k: usize) -> &Rational {
        &self.right[(j * self.algebra.dim() + i) * self.dim + k]
    }

    /// Nonzero left-action entries `(i, j, k, c)`.
    pub fn left_entries(&self) -> Vec<ActionEntry> {
        let m = self.dim;
        self.left
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(f, c)| (f / (m * m), (f / m) % m, f % m, c.clone()))
            .collect()
    }

    /// Nonzero right-action entries `(j, i, k, c)`.
    pub fn right_entries(&self) -> Vec<ActionEntry> {
        let (a, m) = (self.algebra.dim(), self.dim);
        self.right
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(f, c)| (f / (a * m), (f / m) % a, f % m, c.clone()))
            .collect()
    }

    /// `a · m`
    pub fn act_left(&self, a: &[Rational], m: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim];
        for (i, ai) in a.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, mj) in m.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let s = ai * mj;
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.left_coeff(i, j, k);
                    if !c.is_zero() {
                        *o += c * &s;
                    }
                }
            }
        }
        out
    }

    /// `m · a`
    pub fn act_right(&self, m: &[Rational], a: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim];
        for (j, mj) in m.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (i, ai) in a.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let s = mj * ai;
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.right_coeff(j, i, k);
                    if !c.is_zero() {
                        *o += c * &s;
                    }
                }
            }
        }
        out
    }

    fn verify_axioms(&self) -> Result<()> {
        let alg = &self.algebra;
        let (a, m) = (alg.dim(), self.dim);
        for i in 0..a {
            let ei = unit(a, i);
            for j in 0..a {
                let ej = unit(a, j);
                let ij = alg.mul_basis(i, j);
                for k in 0..m {
                    let mk = unit(m, k);
                    // (ab)·m = a·(b·m)
                    if self.act_left(&ij, &mk) != self.act_left(&ei, &self.act_left(&ej, &mk)) {
                        return Err(Error::NotABimodule {
                            axiom: "(ab)m = a(bm)",
                            triple: [i, j, k],
                        });
                    }
                    // m·(ab) = (m·a)·b
                    if self.act_right(&mk, &ij) != self.act_right(&self.act_right(&mk, &ei), &ej) {
                        return Err(Error::NotABimodule {
                            axiom: "m(ab) = (ma)b",
                            triple: [k, i, j],
                        });
                    }
                }
            }
            for k in 0..m {
                let mk = unit(m, k);
                for j in 0..a {
                    let ej = unit(a, j);
                    // (a·m)·b = a·(m·b)
                    if self.act_right(&self.act_left(&ei, &mk), &ej) != self.act_left(&ei, &self.act_right(&mk, &ej)) {
                        return Err(Error::NotABimodule {
                            axiom: "(am)b = a(mb)",
                            triple: [i, k, j],
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// How `A` acts on `A*`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DualConvention {
    /// `(a·ξ)(b) = ξ(ba)`, `(ξ·a)(b) = ξ(ab)`.
    #[default]
    Left,
    /// `(a·ξ)(b) = ξ(ab)`, `(ξ·a)(b) = ξ(ba)`.
    Right,
}

impl DualConvention {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "left" => Some(DualConvention::Left),
            "right" => Some(DualConvention::Right),
            _ => None,
        }
    }
}

/// Action tables of `A` on `A*` (dual basis), without checking the bimodule
/// axioms. Returns `(left, right)` in the entry layout of [`Bimodule::new`].
pub fn dual_action_tables(alg: &Algebra, convention: DualConvention) -> (Vec<ActionEntry>, Vec<ActionEntry>) {
    // e_i·ε^j = Σ_k ε^j(e_k e_i) ε^k under `Left`, Σ_k ε^j(e_i e_k) ε^k under `Right`;
    // ε^j·e_i is the other one.
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (x, y, j, c) in alg.products() {
        // c = ε^j(e_x e_y)
        match convention {
            DualConvention::Left => {
                left.push((y, j, x, c.clone())); // e_y·ε^j has ε^x-coefficient ε^j(e_x e_y)
                right.push((j, x, y, c)); // ε^j·e_x has ε^y-coefficient ε^j(e_x e_y)
            }
            DualConvention::Right => {
                left.push((x, j, y, c.clone()));
                right.push((j, y, x, c));
            }
        }
    }
    (left, right)
}

/// `A*` as an `A`-bimodule by the adjoint action. Fails with
/// [`Error::NotABimodule`] when the chosen convention does not satisfy the
/// bimodule axioms (the `Right` convention on a noncommutative algebra).
pub fn dual_bimodule(alg: Arc<Algebra>, convention: DualConvention) -> Result<Bimodule> {
    let (left, right) = dual_action_tables(&alg, convention);
    let d = alg.dim();
    Bimodule::new(alg, d, left, right)
}

/// The trivial extension `A ⋉ M` with `(a,m)(b,n) = (ab, a·n + m·b)`, split
/// recorded as `dim1 = dim A`.
pub fn semidirect_product(alg: &Algebra, module: &Bimodule) -> Result<Algebra> {
    if module.algebra().as_ref() != alg {
        return Err(Error::DimensionMismatch(
            "bimodule is defined over a different algebra".into(),
        ));
    }
    if module.dim() == 0 {
        return Ok(alg.clone());
    }
    let a = alg.dim();
    let mut products = alg.products();
    for (i, j, k, c) in module.left_entries() {
        products.push((i, a + j, a + k, c));
    }
    for (j, i, k, c) in module.right_entries() {
        products.push((a + j, i, a + k, c));
    }
    let mut basis = alg.basis_labels().to_vec();
    basis.extend((0..module.dim()).map(|k| format!("m{k}")));
    let mut out = Algebra::new(format!("{}⋉M", alg.name()), basis, products)?.with_split(a)?;
    if let (Some(da), Some(dm)) = (alg.degrees(), module.degrees()) {
        out = out.with_degrees(da.iter().chain(dm).copied().collect())?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceReport {
    pub holds: bool,
    /// `(i, j, k)` with `(e_i e_j | e_k) != (e_i | e_j e_k)`, and both values.
    pub witness: Option<([usize; 3], Rational, Rational)>,
}

fn pair(pairing: &LinearOp, x: &[Rational], y: &[Rational]) -> Rational {
    let py = pairing.apply(y);
    x.iter()
        .zip(&py)
        .filter(|(a, b)| !a.is_zero() && !b.is_zero())
        .map(|(a, b)| a * b)
        .fold(Rational::zero(), |acc, t| acc + t)
}

/// Checks `(t1 t2 | t3) = (t1 | t2 t3)` for a symmetric bilinear form.
pub fn check_invariance(alg: &Algebra, pairing: &LinearOp) -> Result<InvarianceReport> {
    let d = alg.dim();
    pairing.expect_shape(d, d, "pairing")?;
    if let Some((r, c)) = pairing.is_symmetric() {
        return Err(Error::NonSymmetricPairing(r, c));
    }
    for i in 0..d {
        for j in 0..d {
            let ij = alg.mul_basis(i, j);
            for k in 0..d {
                let lhs = pair(pairing, &ij, &unit(d, k));
                let rhs = pair(pairing, &unit(d, i), &alg.mul_basis(j, k));
                if lhs != rhs {
                    return Ok(InvarianceReport {
                        holds: false,
                        witness: Some(([i, j, k], lhs, rhs)),
                    });
                }
            }
        }
    }
    Ok(InvarianceReport {
        holds: true,
        witness: None,
    })
}

/// The hyperbolic form `⟨(a,ξ),(b,η)⟩ = ξ(b) + η(a)` on `A ⊕ A*`.
pub fn hyperbolic_pairing(n: usize) -> LinearOp {
    LinearOp::from_fn(2 * n, 2 * n, Role::Total, Role::Total, |r, c| {
        if r + n == c || c + n == r {
            rational::one()
        } else {
            Rational::zero()
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicReport {
    pub holds: bool,
    /// `(a, b, c)` with `φ(a,b)(c)`, `φ(b,c)(a)`, `φ(c,a)(b)` not all equal.
    pub witness: Option<[usize; 3]>,
}

/// Checks `φ(a,b)(c) = φ(b,c)(a) = φ(c,a)(b)` on basis triples of `A1`, where
/// `φ(a,b)(c)` is read through the pairing on the total space.
pub fn check_cyclic_cocycle(split: &SplitContext, phi: &Cochain, pairing: &LinearOp) -> Result<CyclicReport> {
    let d = split.total();
    if phi.dim() != d || phi.arity() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "cyclic check needs an arity-2 cochain over dimension {d}"
        )));
    }
    pairing.expect_shape(d, d, "pairing")?;
    if pairing.rank() != d {
        return Err(Error::Precondition("pairing is degenerate".into()));
    }
    let eval = |a: usize, b: usize, c: usize| pair(pairing, &phi.apply_basis(&[a, b]), &unit(d, c));
    let n1 = split.dim1();
    for a in 0..n1 {
        for b in 0..n1 {
            for c in 0..n1 {
                let x = eval(a, b, c);
                if x != eval(b, c, a) || x != eval(c, a, b) {
                    return Ok(CyclicReport {
                        holds: false,
                        witness: Some([a, b, c]),
                    });
                }
            }
        }
    }
    Ok(CyclicReport {
        holds: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("e{i}")).collect()
    }

    pub(crate) fn matrix_units() -> Algebra {
        // index 0 = E12, index 1 = E11
        Algebra::new(
            "matrix-units",
            vec!["E12".into(), "E11".into()],
            [(1, 1, 1, int(1)), (1, 0, 0, int(1))],
        )
        .unwrap()
    }

    fn scalars() -> Algebra {
        Algebra::new("Q", labels(1), [(0, 0, 0, int(1))]).unwrap()
    }

    #[test]
    fn associativity_examples() {
        assert!(check_associativity(&scalars()).holds);
        assert!(check_associativity(&matrix_units()).holds);
        let bad = Algebra::new("bad", labels(2), [(0, 0, 1, int(1)), (1, 0, 0, int(1))]).unwrap();
        let rep = check_associativity(&bad);
        assert!(!rep.holds);
        let w = rep.witness.unwrap();
        assert_eq!(w.triple, [0, 0, 0]);
        assert_eq!(w.left, vec![int(1), int(0)]);
        assert_eq!(w.right, vec![int(0), int(0)]);
        assert!(!bad.is_associative());
    }

    /// Brute force over all 8 triple products of the matrix-unit algebra using
    /// explicit 2×2 matrices.
    #[test]
    fn matrix_units_against_matrices() {
        type M = [[i64; 2]; 2];
        let mats: [M; 2] = [[[0, 1], [0, 0]], [[1, 0], [0, 0]]];
        let mm = |a: M, b: M| -> M {
            let mut c = [[0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        c[i][j] += a[i][k] * b[k][j];
                    }
                }
            }
            c
        };
        let coords = |m: M| vec![int(m[0][1]), int(m[0][0])];
        let alg = matrix_units();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(alg.mul_basis(i, j), coords(mm(mats[i], mats[j])));
            }
        }
    }

    #[test]
    fn sparse_storage_above_limit() {
        let n = DENSE_LIMIT + 2;
        let alg = Algebra::new("big", labels(n), (0..n).map(|i| (i, i, i, int(1)))).unwrap();
        assert!(!alg.is_dense());
        assert!(matches!(alg.table, StructureTable::Sparse(_)));
        assert_eq!(alg.structure_constant(3, 3, 3), int(1));
        assert_eq!(alg.structure_constant(3, 4, 3), int(0));
        assert!(check_associativity(&alg).holds);
        assert_eq!(alg.products().len(), n);
        assert!(matrix_units().is_dense());
    }

    #[test]
    fn out_of_range_products_rejected() {
        assert!(Algebra::new("x", labels(2), [(0, 2, 0, int(1))]).is_err());
    }

    #[test]
    fn semidirect_examples() {
        let q = Arc::new(scalars());
        let m = Bimodule::canonical(q.clone()).unwrap();
        let t = semidirect_product(&q, &m).unwrap();
        assert_eq!(t.dim(), 2);
        // (a,m)(b,n) = (ab, an + mb)
        assert_eq!(t.mul_basis(0, 0), vec![int(1), int(0)]);
        assert_eq!(t.mul_basis(0, 1), vec![int(0), int(1)]);
        assert_eq!(t.mul_basis(1, 0), vec![int(0), int(1)]);
        assert_eq!(t.mul_basis(1, 1), vec![int(0), int(0)]);
        assert!(t.is_associative());
        assert_eq!(t.split().unwrap().dim1(), 1);

        let mu = Arc::new(matrix_units());
        let dual = dual_bimodule(mu.clone(), DualConvention::Left).unwrap();
        let t = semidirect_product(&mu, &dual).unwrap();
        assert_eq!(t.dim(), 4);
        assert!(check_associativity(&t).holds);

        let zero = Bimodule::new(q.clone(), 0, [], []).unwrap();
        assert_eq!(semidirect_product(&q, &zero).unwrap(), *q);

        assert!(matches!(semidirect_product(&mu, &m), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn dual_examples() {
        let q = Arc::new(scalars());
        let d = dual_bimodule(q, DualConvention::Left).unwrap();
        assert_eq!(d.left_coeff(0, 0, 0), &int(1));
        assert_eq!(d.right_coeff(0, 0, 0), &int(1));

        let mu = Arc::new(matrix_units());
        let left = dual_bimodule(mu.clone(), DualConvention::Left).unwrap();
        // ε^j(b a) against the definition, for every basis a, b and dual ε^j.
        for a in 0..2 {
            for j in 0..2 {
                let xi = unit(2, j);
                let act = left.act_left(&unit(2, a), &xi);
                for (b, v) in act.iter().enumerate() {
                    assert_eq!(*v, mu.mul_basis(b, a)[j]);
                }
                let act = left.act_right(&xi, &unit(2, a));
                for (b, v) in act.iter().enumerate() {
                    assert_eq!(*v, mu.mul_basis(a, b)[j]);
                }
            }
        }

        let (l1, r1) = dual_action_tables(&mu, DualConvention::Left);
        let (l2, r2) = dual_action_tables(&mu, DualConvention::Right);
        assert!(l1 != l2 || r1 != r2);
        assert!(matches!(
            dual_bimodule(mu, DualConvention::Right),
            Err(Error::NotABimodule { .. })
        ));
    }

    #[test]
    fn invariance_examples() {
        let zero = Algebra::new("zero", labels(3), []).unwrap();
        let p = LinearOp::from_fn(3, 3, Role::Total, Role::Total, |r, c| int((r + c) as i64));
        assert!(check_invariance(&zero, &p).unwrap().holds);

        let mu = Arc::new(matrix_units());
        let dual = dual_bimodule(mu.clone(), DualConvention::Left).unwrap();
        let t = semidirect_product(&mu, &dual).unwrap();
        let hyp = hyperbolic_pairing(2);
        assert!(check_invariance(&t, &hyp).unwrap().holds);

        // (E11 | E11) = 1 alone would still be invariant; (E12 | E12) is not.
        let mut bent = hyp.clone();
        bent.set(0, 0, int(1));
        let rep = check_invariance(&t, &bent).unwrap();
        assert!(!rep.holds);
        assert!(rep.witness.is_some());

        let mut asym = hyp;
        asym.set(0, 1, int(5));
        assert_eq!(check_invariance(&t, &asym), Err(Error::NonSymmetricPairing(0, 1)));
    }

    #[test]
    fn cyclic_examples() {
        let split = SplitContext::new(2, 2);
        let hyp = hyperbolic_pairing(2);
        let zero = Cochain::zero(4, 2).unwrap();
        assert!(check_cyclic_cocycle(&split, &zero, &hyp).unwrap().holds);

        // φ(e0, e0) = ε^1 only: φ(0,0)(1) = 1 but φ(0,1)(0) = 0.
        let mut phi = Cochain::zero(4, 2).unwrap();
        phi.set(3, &[0, 0], int(1));
        let rep = check_cyclic_cocycle(&split, &phi, &hyp).unwrap();
        assert!(!rep.holds);
        assert_eq!(rep.witness, Some([0, 0, 1]));

        let degenerate = LinearOp::zero(4, 4, Role::Total, Role::Total);
        assert!(check_cyclic_cocycle(&split, &zero, &degenerate).is_err());
    }

    #[test]
    fn linear_op_basics() {
        let a = LinearOp::from_rows(
            vec![vec![int(1), int(2)], vec![int(3), int(4)]],
            Role::Algebra,
            Role::Algebra,
        )
        .unwrap();
        assert_eq!(a.apply(&[int(1), int(1)]), vec![int(3), int(7)]);
        let sq = a.compose(&a).unwrap();
        assert_eq!(sq.row(0), &[int(7), int(10)]);
        assert_eq!(a.rank(), 2);
        assert_eq!(a.transpose().get(0, 1), &int(3));
        assert!(LinearOp::from_rows(vec![vec![int(1)], vec![]], Role::A1, Role::A1).is_err());
        assert_eq!(Role::parse("M"), Some(Role::Module));
        assert_eq!(Role::A2.to_string(), "A2");
    }
}
