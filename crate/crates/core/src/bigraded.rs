//! Bookkeeping for a split space `T = A1 ⊕ A2`: horizontal lifts, bidegrees,
//! the four-part decomposition of a multiplication and its classification.

use std::fmt;

use num_traits::Zero;

use crate::algebra::{LinearOp, Role};
use crate::cochain::{g_bracket, Cochain};
use crate::error::{Error, Result};
use crate::rational::{frac, Rational};

/// The first `dim1` basis vectors span `A1`, the remaining `dim2` span `A2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SplitContext {
    dim1: usize,
    dim2: usize,
}

/// One of the two summands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Summand {
    A1,
    A2,
}

impl Summand {
    /// `1 → A1`, `2 → A2`.
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Summand::A1),
            2 => Ok(Summand::A2),
            other => Err(Error::BadBlock(other)),
        }
    }

    pub fn other(self) -> Self {
        match self {
            Summand::A1 => Summand::A2,
            Summand::A2 => Summand::A1,
        }
    }

    pub fn role(self) -> Role {
        match self {
            Summand::A1 => Role::A1,
            Summand::A2 => Role::A2,
        }
    }
}

impl SplitContext {
    pub fn new(dim1: usize, dim2: usize) -> Self {
        SplitContext { dim1, dim2 }
    }

    pub fn dim1(&self) -> usize {
        self.dim1
    }

    pub fn dim2(&self) -> usize {
        self.dim2
    }

    pub fn total(&self) -> usize {
        self.dim1 + self.dim2
    }

    pub fn dim_of(&self, s: Summand) -> usize {
        match s {
            Summand::A1 => self.dim1,
            Summand::A2 => self.dim2,
        }
    }

    /// Global index of the first basis vector of `s`.
    pub fn offset(&self, s: Summand) -> usize {
        match s {
            Summand::A1 => 0,
            Summand::A2 => self.dim1,
        }
    }

    pub fn summand(&self, index: usize) -> Summand {
        if index < self.dim1 {
            Summand::A1
        } else {
            Summand::A2
        }
    }

    /// The split `A2 ⊕ A1` and the basis permutation realizing it:
    /// new basis vector `j` is old basis vector `perm[j]`.
    pub fn mirrored(&self) -> (SplitContext, Vec<usize>) {
        let perm = (self.dim1..self.total()).chain(0..self.dim1).collect();
        (SplitContext::new(self.dim2, self.dim1), perm)
    }

    /// Bidegree of a single coefficient position `(out, in_1, …, in_n)`.
    pub fn entry_bidegree(&self, idx: &[usize]) -> Bidegree {
        let a = idx[1..].iter().filter(|&&i| i < self.dim1).count();
        let b = idx.len() - 1 - a;
        match self.summand(idx[0]) {
            Summand::A1 => Bidegree { k: b + 1, l: a },
            Summand::A2 => Bidegree { k: b, l: a + 1 },
        }
    }

    fn check_dim(&self, f: &Cochain) -> Result<()> {
        if f.dim() != self.total() {
            return Err(Error::DimensionMismatch(format!(
                "cochain over dimension {} used with a {}+{} split",
                f.dim(),
                self.dim1,
                self.dim2
            )));
        }
        Ok(())
    }
}

/// `k|l`: a homogeneous cochain of arity `n` has `k + l = n + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bidegree {
    pub k: usize,
    pub l: usize,
}

impl Bidegree {
    pub const fn new(k: usize, l: usize) -> Self {
        Bidegree { k, l }
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.k, self.l)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BidegreeResult {
    /// The zero cochain is homogeneous of every bidegree.
    Zero,
    Homogeneous(Bidegree),
    /// `witness` is the first nonzero entry whose bidegree differs from that
    /// of the first nonzero entry.
    Inhomogeneous {
        first: Bidegree,
        witness: Vec<usize>,
        witness_bidegree: Bidegree,
    },
}

impl BidegreeResult {
    pub fn homogeneous(&self) -> Option<Bidegree> {
        match self {
            BidegreeResult::Homogeneous(b) => Some(*b),
            _ => None,
        }
    }

    /// Whether `f` is zero or homogeneous of bidegree `b`.
    pub fn fits(&self, b: Bidegree) -> bool {
        match self {
            BidegreeResult::Zero => true,
            BidegreeResult::Homogeneous(x) => *x == b,
            BidegreeResult::Inhomogeneous { .. } => false,
        }
    }
}

impl fmt::Display for BidegreeResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BidegreeResult::Zero => f.write_str("zero"),
            BidegreeResult::Homogeneous(b) => write!(f, "{b}"),
            BidegreeResult::Inhomogeneous {
                first,
                witness,
                witness_bidegree,
            } => write!(f, "inhomogeneous ({first} and {witness_bidegree} at {witness:?})"),
        }
    }
}

pub fn bidegree_of(split: &SplitContext, f: &Cochain) -> Result<BidegreeResult> {
    split.check_dim(f)?;
    let mut entries = f.nonzero_entries();
    let Some((first_idx, _)) = entries.next() else {
        return Ok(BidegreeResult::Zero);
    };
    let first = split.entry_bidegree(&first_idx);
    for (idx, _) in entries {
        let b = split.entry_bidegree(&idx);
        if b != first {
            return Ok(BidegreeResult::Inhomogeneous {
                first,
                witness: idx,
                witness_bidegree: b,
            });
        }
    }
    Ok(BidegreeResult::Homogeneous(first))
}

/// The `k|l`-homogeneous part of `f`; zero when `k + l - 1` is not the arity.
pub fn project_bidegree(split: &SplitContext, f: &Cochain, k: usize, l: usize) -> Result<Cochain> {
    split.check_dim(f)?;
    let target = Bidegree::new(k, l);
    let mut out = Cochain::zero(f.dim(), f.arity())?;
    if k + l != f.arity() + 1 {
        return Ok(out);
    }
    for (idx, c) in f.nonzero_entries() {
        if split.entry_bidegree(&idx) == target {
            out.set(idx[0], &idx[1..], c.clone());
        }
    }
    Ok(out)
}

/// The part of `f` on the block `A_{inputs[0]} ⊗ … → A_output`.
pub fn project_block(split: &SplitContext, f: &Cochain, inputs: &[Summand], output: Summand) -> Result<Cochain> {
    split.check_dim(f)?;
    if inputs.len() != f.arity() {
        return Err(Error::DimensionMismatch(format!(
            "block of arity {} for a cochain of arity {}",
            inputs.len(),
            f.arity()
        )));
    }
    let mut out = Cochain::zero(f.dim(), f.arity())?;
    for (idx, c) in f.nonzero_entries() {
        let in_block =
            split.summand(idx[0]) == output && idx[1..].iter().zip(inputs).all(|(&i, &s)| split.summand(i) == s);
        if in_block {
            out.set(idx[0], &idx[1..], c.clone());
        }
    }
    Ok(out)
}

/// A multilinear map `A_{inputs[0]} ⊗ … ⊗ A_{inputs[n-1]} → A_output` in the
/// local bases of the summands, indexed `(out, in_1, …, in_n)` like a cochain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMap {
    pub inputs: Vec<Summand>,
    pub output: Summand,
    entries: Vec<(usize, Vec<usize>, Rational)>,
}

impl BlockMap {
    pub fn new(inputs: Vec<Summand>, output: Summand) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::ZeroArity);
        }
        Ok(BlockMap {
            inputs,
            output,
            entries: Vec::new(),
        })
    }

    /// Blocks given as 1/2 indices, as they appear in documents.
    pub fn from_indices(inputs: &[u8], output: u8) -> Result<Self> {
        let inputs = inputs
            .iter()
            .map(|&i| Summand::from_index(i))
            .collect::<Result<Vec<_>>>()?;
        BlockMap::new(inputs, Summand::from_index(output)?)
    }

    /// Adds `c` at local position `(out, ins)`.
    pub fn with(mut self, out: usize, ins: &[usize], c: Rational) -> Self {
        self.entries.push((out, ins.to_vec(), c));
        self
    }

    pub fn from_op(op: &LinearOp) -> Result<Self> {
        let side = |r: Role| match r {
            Role::A1 => Ok(Summand::A1),
            Role::A2 => Ok(Summand::A2),
            other => Err(Error::RoleMismatch {
                expected: "A1 or A2".into(),
                found: other.to_string(),
            }),
        };
        let mut m = BlockMap::new(vec![side(op.domain())?], side(op.codomain())?)?;
        for r in 0..op.rows() {
            for c in 0..op.cols() {
                let v = op.get(r, c);
                if !v.is_zero() {
                    m.entries.push((r, vec![c], v.clone()));
                }
            }
        }
        Ok(m)
    }
}

/// Horizontal lift: the cochain on `T` equal to `f` on its block and zero elsewhere.
pub fn lift(split: &SplitContext, f: &BlockMap) -> Result<Cochain> {
    let mut out = Cochain::zero(split.total(), f.inputs.len())?;
    let out_dim = split.dim_of(f.output);
    for (o, ins, c) in &f.entries {
        if ins.len() != f.inputs.len() {
            return Err(Error::DimensionMismatch("block map entry arity".into()));
        }
        if *o >= out_dim {
            return Err(Error::DimensionMismatch(format!(
                "output index {o} out of range for a summand of dimension {out_dim}"
            )));
        }
        let mut global = Vec::with_capacity(ins.len());
        for (&i, &s) in ins.iter().zip(&f.inputs) {
            if i >= split.dim_of(s) {
                return Err(Error::DimensionMismatch(format!(
                    "input index {i} out of range for a summand of dimension {}",
                    split.dim_of(s)
                )));
            }
            global.push(split.offset(s) + i);
        }
        let go = split.offset(f.output) + o;
        let v = out.get(go, &global) + c;
        out.set(go, &global, v);
    }
    Ok(out)
}

/// Lift of a linear map `A2 → A1` or `A1 → A2` given as a tagged matrix.
pub fn lift_op(split: &SplitContext, op: &LinearOp) -> Result<Cochain> {
    let (rows, cols) = match op.roles() {
        (Role::A2, Role::A1) => (split.dim1(), split.dim2()),
        (Role::A1, Role::A2) => (split.dim2(), split.dim1()),
        found => return Err(Error::role((Role::A2, Role::A1), found)),
    };
    op.expect_shape(rows, cols, "split operator")?;
    lift(split, &BlockMap::from_op(op)?)
}

pub const PHI1: Bidegree = Bidegree::new(0, 3);
pub const MU1: Bidegree = Bidegree::new(1, 2);
pub const MU2: Bidegree = Bidegree::new(2, 1);
pub const PHI2: Bidegree = Bidegree::new(3, 0);

/// A multiplication on `A1 ⊕ A2` split into its four homogeneous parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtoStructure {
    split: SplitContext,
    /// `0|3`: `A1 ⊗ A1 → A2`
    pub phi1: Cochain,
    /// `1|2`: `A1 ⊗ A1 → A1`, `A1 ⊗ A2 → A2`, `A2 ⊗ A1 → A2`
    pub mu1: Cochain,
    /// `2|1`: `A2 ⊗ A2 → A2`, `A1 ⊗ A2 → A1`, `A2 ⊗ A1 → A1`
    pub mu2: Cochain,
    /// `3|0`: `A2 ⊗ A2 → A1`
    pub phi2: Cochain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StructureClass {
    Twilled,
    /// `φ2 = 0`, `φ1 ≠ 0`
    QuasiPhi2Zero,
    /// `φ1 = 0`, `φ2 ≠ 0`
    QuasiPhi1Zero,
    Proto,
}

impl StructureClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StructureClass::Twilled => "twilled",
            StructureClass::QuasiPhi2Zero => "quasi(phi2=0)",
            StructureClass::QuasiPhi1Zero => "quasi(phi1=0)",
            StructureClass::Proto => "proto",
        }
    }
}

impl fmt::Display for StructureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl ProtoStructure {
    /// Checks that every part has its declared bidegree.
    pub fn new(split: SplitContext, phi1: Cochain, mu1: Cochain, mu2: Cochain, phi2: Cochain) -> Result<Self> {
        for (name, c, b) in [
            ("phi1", &phi1, PHI1),
            ("mu1", &mu1, MU1),
            ("mu2", &mu2, MU2),
            ("phi2", &phi2, PHI2),
        ] {
            if c.arity() != 2 {
                return Err(Error::DimensionMismatch(format!("{name} must have arity 2")));
            }
            let found = bidegree_of(&split, c)?;
            if !found.fits(b) {
                return Err(Error::Precondition(format!(
                    "{name} must have bidegree {b}, found {found}"
                )));
            }
        }
        Ok(ProtoStructure {
            split,
            phi1,
            mu1,
            mu2,
            phi2,
        })
    }

    pub fn split(&self) -> &SplitContext {
        &self.split
    }

    pub fn dim(&self) -> usize {
        self.split.total()
    }

    /// `θ = φ1 + μ1 + μ2 + φ2`
    pub fn total(&self) -> Cochain {
        let mut t = self.phi1.clone();
        t += &self.mu1;
        t += &self.mu2;
        t += &self.phi2;
        t
    }

    pub fn parts(&self) -> [(&'static str, &Cochain); 4] {
        [
            ("phi1", &self.phi1),
            ("mu1", &self.mu1),
            ("mu2", &self.mu2),
            ("phi2", &self.phi2),
        ]
    }

    /// The same structure seen on `A2 ⊕ A1`; the roles of `φ1`/`φ2` and
    /// `μ1`/`μ2` swap.
    pub fn mirrored(&self) -> (ProtoStructure, Vec<usize>) {
        let (split, perm) = self.split.mirrored();
        let ps = ProtoStructure {
            split,
            phi1: self.phi2.permute_basis(&perm),
            mu1: self.mu2.permute_basis(&perm),
            mu2: self.mu1.permute_basis(&perm),
            phi2: self.phi1.permute_basis(&perm),
        };
        (ps, perm)
    }

    pub fn classify(&self) -> StructureClass {
        classify(self)
    }
}

/// Splits an arity-2 cochain into its `0|3`, `1|2`, `2|1`, `3|0` parts.
pub fn decompose_structure(split: &SplitContext, theta: &Cochain) -> Result<ProtoStructure> {
    if theta.arity() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "a multiplication has arity 2, got {}",
            theta.arity()
        )));
    }
    split.check_dim(theta)?;
    let d = theta.dim();
    let mut parts: [Cochain; 4] = std::array::from_fn(|_| Cochain::zero(d, 2).expect("arity 2"));
    for (idx, c) in theta.nonzero_entries() {
        let slot = split.entry_bidegree(&idx).k;
        parts[slot].set(idx[0], &idx[1..], c.clone());
    }
    let [phi1, mu1, mu2, phi2] = parts;
    Ok(ProtoStructure {
        split: *split,
        phi1,
        mu1,
        mu2,
        phi2,
    })
}

pub fn classify(ps: &ProtoStructure) -> StructureClass {
    match (ps.phi1.is_zero(), ps.phi2.is_zero()) {
        (true, true) => StructureClass::Twilled,
        (false, true) => StructureClass::QuasiPhi2Zero,
        (true, false) => StructureClass::QuasiPhi1Zero,
        (false, false) => StructureClass::Proto,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub name: &'static str,
    pub holds: bool,
    /// The left-hand side, an arity-3 cochain.
    pub residual: Cochain,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtoConditionsReport {
    pub conditions: Vec<Condition>,
    /// `{θ, θ} = 0`, computed on the total structure.
    pub theta_associative: bool,
}

impl ProtoConditionsReport {
    pub fn all_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }

    /// The five conditions and `{θ, θ} = 0` agree.
    pub fn consistent(&self) -> bool {
        self.all_hold() == self.theta_associative
    }
}

/// The five compatibility conditions, each a bidegree component of `½{θ, θ}`.
pub fn check_proto_conditions(ps: &ProtoStructure) -> Result<ProtoConditionsReport> {
    let half = frac(1, 2);
    let b = |f: &Cochain, g: &Cochain| g_bracket(f, g);
    let (p1, m1, m2, p2) = (&ps.phi1, &ps.mu1, &ps.mu2, &ps.phi2);
    let residuals = [
        ("{mu1,phi1} = 0", b(m1, p1)?),
        ("1/2{mu1,mu1} + {mu2,phi1} = 0", b(m1, m1)?.scale(&half) + b(m2, p1)?),
        ("{mu1,mu2} + {phi1,phi2} = 0", b(m1, m2)? + b(p1, p2)?),
        ("1/2{mu2,mu2} + {mu1,phi2} = 0", b(m2, m2)?.scale(&half) + b(m1, p2)?),
        ("{mu2,phi2} = 0", b(m2, p2)?),
    ];
    let theta = ps.total();
    let theta_associative = g_bracket(&theta, &theta)?.is_zero();
    let report = ProtoConditionsReport {
        conditions: residuals
            .into_iter()
            .map(|(name, residual)| Condition {
                name,
                holds: residual.is_zero(),
                residual,
            })
            .collect(),
        theta_associative,
    };
    if !report.consistent() {
        return Err(Error::Internal(
            "the five conditions disagree with {theta,theta}".into(),
        ));
    }
    Ok(report)
}
