//! Ready-made algebras, bimodules and operators for the standard examples,
//! each bundled with the claims it is expected to satisfy.
//!
//! Models that stand in for infinite-dimensional algebras are truncated
//! (polynomials mod `t^N`, a truncated Weyl algebra) and carry basis degrees;
//! their claims come with the degree bound under which the truncation drops
//! nothing.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::algebra::{
    dual_bimodule, hyperbolic_pairing, semidirect_product, Algebra, Bimodule, DualConvention, LinearOp, Role,
};
use crate::bigraded::{classify, decompose_structure, StructureClass};
use crate::error::{Error, Result};
use crate::filter::DegreeBound;
use crate::rational::{self, frac, int, Rational};
use crate::twisting::{check_twist_isomorphism, twist_series};
use crate::verify::{verify, Identity, VerifyInputs, VerifyOutcome};

/// Default truncation for the polynomial-type models.
pub const DEFAULT_N: usize = 8;
pub const MAX_N: usize = 12;
pub const MAX_WEYL_N: usize = 10;
pub const MAX_BASE_DIM: usize = 4;

pub const ENTRIES: [(&str, &str); 9] = [
    (
        "trivial-extension",
        "A ⋉ M for a base algebra and its canonical or dual bimodule",
    ),
    (
        "q-twilled",
        "A ⋈_q A: (a,x)(b,y) = (ab, ay + xb + q xy), with a weight-q Rota-Baxter operator",
    ),
    ("quasi-trivial", "A ⊕_Q A: (a,x)(b,y) = (ab + Q xy, ay + xb)"),
    (
        "rmatrix-2dim",
        "matrix units E12, E11 with r = E12 ∧ E11 on the dual bimodule",
    ),
    (
        "poly-integral",
        "Q[t]/(t^N) with the integral, Omega = omega d/dt and N = integral ∘ Omega",
    ),
    (
        "poly-split-rb",
        "B = R + (q/2) id on A ⊕_{q²/4} A for a weight-q Rota-Baxter R on Q[t]/(t^N)",
    ),
    (
        "formal-series",
        "Q[nu]/(nu^N) with the integral and Omega = z nu^k d/dnu",
    ),
    (
        "reynolds",
        "averaging operator on pointwise Q^n, as a twisted Rota-Baxter operator",
    ),
    ("weyl", "truncated Weyl algebra with the x-integral and Omega = [d, ·]"),
];

/// One verification an entry is expected to pass (or, for negative
/// controls, to fail).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Claim {
    pub identity: Identity,
    pub algebra: String,
    pub module: Option<String>,
    pub op: Option<String>,
    pub op2: Option<String>,
    pub weight: Option<Rational>,
    pub bound: DegreeBound,
    pub expect: bool,
}

impl Claim {
    fn new(identity: Identity, algebra: &str) -> Self {
        Claim {
            identity,
            algebra: algebra.into(),
            module: None,
            op: None,
            op2: None,
            weight: None,
            bound: DegreeBound::default(),
            expect: true,
        }
    }

    fn module(mut self, m: &str) -> Self {
        self.module = Some(m.into());
        self
    }

    fn op(mut self, o: &str) -> Self {
        self.op = Some(o.into());
        self
    }

    fn op2(mut self, o: &str) -> Self {
        self.op2 = Some(o.into());
        self
    }

    fn weight(mut self, w: Rational) -> Self {
        self.weight = Some(w);
        self
    }

    fn bound(mut self, b: DegreeBound) -> Self {
        self.bound = b;
        self
    }

    fn expect(mut self, e: bool) -> Self {
        self.expect = e;
        self
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: String,
    /// Every parameter with its resolved value.
    pub params: BTreeMap<String, String>,
    pub algebras: Vec<(String, Arc<Algebra>)>,
    /// Bimodules by name, with the name of the algebra they live over.
    pub modules: Vec<(String, String, Bimodule)>,
    pub operators: Vec<(String, LinearOp)>,
    /// Claimed classification of split algebras.
    pub classes: Vec<(String, StructureClass)>,
    pub claims: Vec<Claim>,
}

impl CatalogEntry {
    fn new(id: &str, params: BTreeMap<String, String>) -> Self {
        CatalogEntry {
            id: id.into(),
            params,
            algebras: Vec::new(),
            modules: Vec::new(),
            operators: Vec::new(),
            classes: Vec::new(),
            claims: Vec::new(),
        }
    }

    pub fn algebra(&self, name: &str) -> Result<&Arc<Algebra>> {
        self.algebras
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, a)| a)
            .ok_or_else(|| Error::Internal(format!("entry {} has no algebra {name}", self.id)))
    }

    pub fn module(&self, name: &str) -> Result<&Bimodule> {
        self.modules
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|(_, _, m)| m)
            .ok_or_else(|| Error::Internal(format!("entry {} has no bimodule {name}", self.id)))
    }

    pub fn operator(&self, name: &str) -> Result<&LinearOp> {
        self.operators
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, o)| o)
            .ok_or_else(|| Error::Internal(format!("entry {} has no operator {name}", self.id)))
    }

    fn add_algebra(&mut self, name: &str, alg: Algebra) -> Arc<Algebra> {
        let a = Arc::new(alg.with_name(name));
        self.algebras.push((name.into(), a.clone()));
        a
    }

    fn add_op(&mut self, name: &str, op: LinearOp) {
        self.operators.push((name.into(), op));
    }

    /// Runs one claim through the shared verifier.
    pub fn verify_claim(&self, claim: &Claim) -> Result<VerifyOutcome> {
        let alg = self.algebra(&claim.algebra)?;
        let module = claim.module.as_deref().map(|m| self.module(m)).transpose()?;
        let op = claim.op.as_deref().map(|o| self.operator(o)).transpose()?;
        let op2 = claim.op2.as_deref().map(|o| self.operator(o)).transpose()?;
        verify(
            claim.identity,
            &VerifyInputs {
                algebra: Some(alg),
                module,
                op,
                op2,
                weight: claim.weight.as_ref(),
                split: None,
                bound: claim.bound,
            },
        )
    }

    /// Classification of every split algebra against its claim.
    pub fn check_classes(&self) -> Result<Vec<(String, StructureClass, StructureClass)>> {
        self.classes
            .iter()
            .map(|(name, expected)| {
                let alg = self.algebra(name)?;
                let split = alg
                    .split()
                    .ok_or_else(|| Error::Internal(format!("{name} has no split")))?;
                let ps = decompose_structure(&split, &alg.structure_cochain())?;
                Ok((name.clone(), *expected, classify(&ps)))
            })
            .collect()
    }
}

struct Params {
    given: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

impl Params {
    fn new(given: &BTreeMap<String, String>) -> Self {
        Params {
            given: given.clone(),
            resolved: BTreeMap::new(),
        }
    }

    fn raw(&mut self, name: &str, default: &str) -> String {
        let v = self.given.remove(name).unwrap_or_else(|| default.to_string());
        self.resolved.insert(name.into(), v.clone());
        v
    }

    fn rational(&mut self, name: &str, default: &str) -> Result<Rational> {
        let v = self.raw(name, default);
        rational::parse(&v).map_err(|e| Error::ParamOutOfRange {
            name: name.into(),
            message: e.to_string(),
        })
    }

    fn usize_in(&mut self, name: &str, default: usize, lo: usize, hi: usize) -> Result<usize> {
        let v = self.raw(name, &default.to_string());
        match v.parse::<usize>() {
            Ok(n) if (lo..=hi).contains(&n) => Ok(n),
            _ => Err(Error::ParamOutOfRange {
                name: name.into(),
                message: format!("expected an integer in {lo}..={hi}, got `{v}`"),
            }),
        }
    }

    fn choice(&mut self, name: &str, default: &str, allowed: &[&str]) -> Result<String> {
        let v = self.raw(name, default);
        if allowed.contains(&v.as_str()) {
            Ok(v)
        } else {
            Err(Error::ParamOutOfRange {
                name: name.into(),
                message: format!("expected one of {allowed:?}, got `{v}`"),
            })
        }
    }

    fn finish(self) -> Result<BTreeMap<String, String>> {
        if let Some(name) = self.given.keys().next() {
            return Err(Error::ParamOutOfRange {
                name: name.clone(),
                message: "unknown parameter".into(),
            });
        }
        Ok(self.resolved)
    }
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// `ℚ` with `e0 e0 = e0`.
pub fn scalars() -> Algebra {
    Algebra::new("Q", vec!["1".into()], [(0, 0, 0, int(1))])
        .and_then(|a| a.with_degrees(vec![0]))
        .expect("valid table")
}

/// The span of `E12` (index 0) and `E11` (index 1) inside 2×2 matrices.
pub fn matrix_units() -> Algebra {
    Algebra::new(
        "matrix-units",
        vec!["E12".into(), "E11".into()],
        [(1, 1, 1, int(1)), (1, 0, 0, int(1))],
    )
    .expect("valid table")
}

/// All 2×2 matrices, basis `E11, E12, E21, E22`.
pub fn full_matrices() -> Algebra {
    let idx = |r: usize, c: usize| 2 * r + c;
    let mut products = Vec::new();
    for (i, j, k) in (0..2).flat_map(|i| (0..2).flat_map(move |j| (0..2).map(move |k| (i, j, k)))) {
        // E_ij E_jk = E_ik
        products.push((idx(i, j), idx(j, k), idx(i, k), int(1)));
    }
    Algebra::new(
        "M2",
        vec!["E11".into(), "E12".into(), "E21".into(), "E22".into()],
        products,
    )
    .expect("valid table")
}

/// `ℚ[t]/(t^n)` with basis `t^i` of degree `i`.
pub fn truncated_poly(n: usize) -> Algebra {
    let products = (0..n).flat_map(|i| (0..n - i).map(move |j| (i, j, i + j, int(1))));
    Algebra::new(format!("Q[t]/t^{n}"), labels("t", n), products.collect::<Vec<_>>())
        .and_then(|a| a.with_degrees((0..n as u32).collect()))
        .expect("valid table")
}

/// `ℚ^n` with pointwise multiplication.
pub fn pointwise(n: usize) -> Algebra {
    Algebra::new(format!("Q^{n}"), labels("p", n), (0..n).map(|i| (i, i, i, int(1))))
        .and_then(|a| a.with_degrees(vec![0; n]))
        .expect("valid table")
}

fn binomial(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

/// Normal-ordered basis `∂^i x^j` (`∂` on the left) with `i + j < n`, ordered
/// by total degree, then by `i`.
pub fn weyl_basis(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|t| (0..=t).map(move |i| (i, t - i))).collect()
}

/// The truncated Weyl algebra: `x∂ = ∂x − 1` rewritten exhaustively, then
/// terms of degree `≥ n` dropped. Not associative; use degree filters.
pub fn weyl(n: usize) -> Algebra {
    let basis = weyl_basis(n);
    let index: BTreeMap<(usize, usize), usize> = basis.iter().enumerate().map(|(k, &ij)| (ij, k)).collect();
    let mut products = Vec::new();
    for (p, &(a, b)) in basis.iter().enumerate() {
        for (q, &(c, d)) in basis.iter().enumerate() {
            // ∂^a x^b ∂^c x^d = Σ_k (−1)^k k! C(b,k) C(c,k) ∂^{a+c−k} x^{b+d−k}
            for k in 0..=b.min(c) {
                let coeff = factorial(k) * binomial(b, k) * binomial(c, k);
                let coeff = if k % 2 == 0 { coeff } else { -coeff };
                if let Some(&r) = index.get(&(a + c - k, b + d - k)) {
                    products.push((p, q, r, int(coeff)));
                }
            }
        }
    }
    let labels = basis.iter().map(|(i, j)| format!("d^{i}x^{j}")).collect();
    let degrees = basis.iter().map(|(i, j)| (i + j) as u32).collect();
    Algebra::new(format!("Weyl_{n}"), labels, products)
        .and_then(|a| a.with_degrees(degrees))
        .expect("valid table")
}

/// `(a,x)(b,y) = (ab + Q xy, ay + xb + q xy)` on `A ⊕ A`, split after `A`.
pub fn double(base: &Algebra, q: &Rational, big_q: &Rational) -> Algebra {
    let n = base.dim();
    let mut products = Vec::new();
    for (i, j, k, c) in base.products() {
        products.push((i, j, k, c.clone()));
        products.push((i, n + j, n + k, c.clone()));
        products.push((n + i, j, n + k, c.clone()));
        if !q.is_zero() {
            products.push((n + i, n + j, n + k, &c * q));
        }
        if !big_q.is_zero() {
            products.push((n + i, n + j, k, &c * big_q));
        }
    }
    let mut basis: Vec<String> = base.basis_labels().iter().map(|l| format!("({l},0)")).collect();
    basis.extend(base.basis_labels().iter().map(|l| format!("(0,{l})")));
    let mut alg = Algebra::new(
        format!(
            "{} double q={} Q={}",
            base.name(),
            rational::format(q),
            rational::format(big_q)
        ),
        basis,
        products,
    )
    .and_then(|a| a.with_split(n))
    .expect("valid table");
    if let Some(d) = base.degrees() {
        alg = alg
            .with_degrees(d.iter().chain(d).copied().collect())
            .expect("degree count");
    }
    alg
}

/// `J(t^i) = t^{i+1}/(i+1)`; the top power goes to zero.
pub fn integral(n: usize, domain: Role, codomain: Role) -> LinearOp {
    LinearOp::from_fn(n, n, domain, codomain, |r, c| {
        if r == c + 1 {
            frac(1, c as i64 + 1)
        } else {
            Rational::zero()
        }
    })
}

/// `f ↦ ω f'` on `ℚ[t]/(t^n)` for `ω = Σ omega[k] t^k`.
pub fn omega_derivative(n: usize, omega: &[Rational], domain: Role, codomain: Role) -> LinearOp {
    LinearOp::from_fn(n, n, domain, codomain, |r, c| {
        // ω · (t^c)' = Σ_k omega[k] c t^{k + c − 1}
        if c == 0 || r + 1 < c {
            return Rational::zero();
        }
        let k = r + 1 - c;
        omega.get(k).map_or_else(Rational::zero, |w| w * int(c as i64))
    })
}

/// `R(f) = −q (f − f(0))`, a Rota-Baxter operator of weight `q` on `ℚ[t]/(t^n)`.
pub fn augmentation_rb(n: usize, q: &Rational, domain: Role, codomain: Role) -> LinearOp {
    LinearOp::from_fn(n, n, domain, codomain, |r, c| {
        if r == c && r > 0 {
            -q.clone()
        } else {
            Rational::zero()
        }
    })
}

/// A Rota-Baxter operator of weight `q` on a base algebra: the augmentation
/// one on truncated polynomials, `−q·id` otherwise.
fn weight_q_rb(base: &Algebra, q: &Rational, domain: Role, codomain: Role) -> LinearOp {
    if base.name().starts_with("Q[t]") {
        augmentation_rb(base.dim(), q, domain, codomain)
    } else {
        LinearOp::scalar(base.dim(), &-q.clone(), domain, codomain)
    }
}

fn base_algebra(p: &mut Params, default: &str) -> Result<Algebra> {
    let base = p.choice("base", default, &["Q", "matrix-units", "M2", "poly", "pointwise"])?;
    Ok(match base.as_str() {
        "Q" => scalars(),
        "matrix-units" => matrix_units(),
        "M2" => full_matrices(),
        "poly" => truncated_poly(p.usize_in("n", DEFAULT_N, 1, MAX_N)?),
        _ => pointwise(p.usize_in("n", 3, 1, MAX_BASE_DIM)?),
    })
}

/// Largest total input degree for pair inputs when the identity applies
/// degree-raising maps `growth` times in a single term and the model keeps
/// degrees `< cutoff`.
pub fn safe_total(cutoff: usize, growth: usize) -> u32 {
    cutoff.saturating_sub(1 + growth) as u32
}

pub fn list() -> &'static [(&'static str, &'static str)] {
    &ENTRIES
}

/// Builds the entry `id` with the given parameters (unlisted ones take
/// their defaults).
pub fn build(id: &str, params: &BTreeMap<String, String>) -> Result<CatalogEntry> {
    let mut p = Params::new(params);
    let entry = match id {
        "trivial-extension" => trivial_extension(&mut p)?,
        "q-twilled" => q_twilled(&mut p)?,
        "quasi-trivial" => quasi_trivial(&mut p)?,
        "rmatrix-2dim" => rmatrix(&mut p)?,
        "poly-integral" => poly_integral(&mut p)?,
        "poly-split-rb" => poly_split_rb(&mut p)?,
        "formal-series" => formal_series(&mut p)?,
        "reynolds" => reynolds(&mut p)?,
        "weyl" => weyl_entry(&mut p)?,
        other => return Err(Error::UnknownCatalogEntry(other.into())),
    };
    let resolved = p.finish()?;
    Ok(CatalogEntry {
        params: resolved,
        ..entry
    })
}

fn parse_convention(p: &mut Params) -> Result<DualConvention> {
    let c = p.choice("convention", "left", &["left", "right"])?;
    Ok(DualConvention::parse(&c).expect("checked"))
}

fn trivial_extension(p: &mut Params) -> Result<CatalogEntry> {
    let mut e = CatalogEntry::new("trivial-extension", BTreeMap::new());
    let base = e.add_algebra("base", base_algebra(p, "matrix-units")?);
    let kind = p.choice("module", "dual", &["canonical", "dual"])?;
    let module = if kind == "canonical" {
        Bimodule::canonical(base.clone())?
    } else {
        dual_bimodule(base.clone(), parse_convention(p)?)?
    };
    let t = semidirect_product(&base, &module)?;
    e.add_algebra("T", t);
    e.modules.push((kind, "base".into(), module));
    e.classes.push(("T".into(), StructureClass::Twilled));
    e.claims.push(Claim::new(Identity::Associativity, "T"));
    Ok(e)
}

fn q_twilled(p: &mut Params) -> Result<CatalogEntry> {
    let mut e = CatalogEntry::new("q-twilled", BTreeMap::new());
    let base = e.add_algebra("base", base_algebra(p, "Q")?);
    let q = p.rational("q", "1")?;
    e.add_algebra("T", double(&base, &q, &Rational::zero()));
    e.add_op("R", weight_q_rb(&base, &q, Role::Algebra, Role::Algebra));
    e.add_op("H", weight_q_rb(&base, &q, Role::A2, Role::A1));
    e.add_op("zero", LinearOp::zero(base.dim(), base.dim(), Role::A2, Role::A1));
    e.classes.push(("T".into(), StructureClass::Twilled));
    e.claims.push(Claim::new(Identity::Associativity, "T"));
    e.claims.push(Claim::new(Identity::Rb, "base").op("R").weight(q));
    e.claims.push(Claim::new(Identity::Mc, "T").op("H"));
    e.claims.push(Claim::new(Identity::Induced, "T").op("H"));
    e.claims.push(Claim::new(Identity::StrongMc, "T").op("zero"));
    Ok(e)
}

fn quasi_trivial(p: &mut Params) -> Result<CatalogEntry> {
    let mut e = CatalogEntry::new("quasi-trivial", BTreeMap::new());
    let base = e.add_algebra("base", base_algebra(p, "Q")?);
    let big_q = p.rational("Q", "1")?;
    e.add_algebra("T", double(&base, &Rational::zero(), &big_q));
    e.add_op("zero", LinearOp::zero(base.dim(), base.dim(), Role::A2, Role::A1));
    let class = if big_q.is_zero() {
        StructureClass::Twilled
    } else {
        StructureClass::QuasiPhi1Zero
    };
    e.classes.push(("T".into(), class));
    e.claims.push(Claim::new(Identity::Associativity, "T"));
    e.claims
        .push(Claim::new(Identity::Qmc, "T").op("zero").expect(big_q.is_zero()));
    Ok(e)
}

fn rmatrix(p: &mut Params) -> Result<CatalogEntry> {
    let mut e = CatalogEntry::new("rmatrix-2dim", BTreeMap::new());
    let a = e.add_algebra("matrix-units", matrix_units());
    let dual = dual_bimodule(a.clone(), parse_convention(p)?)?;
    e.add_algebra("T", semidirect_product(&a, &dual)?);
    e.modules.push(("dual".into(), "matrix-units".into(), dual));
    // r = E12 ⊗ E11 − E11 ⊗ E12, as the coefficient matrix r[a][b].
    let r = LinearOp::from_rows(
        vec![vec![int(0), int(1)], vec![int(-1), int(0)]],
        Role::Algebra,
        Role::Algebra,
    )?;
    // r̃(ξ) = Σ r[a][b] ξ(e_a) e_b
    e.add_op("pi", r.transpose().with_roles(Role::Module, Role::Algebra));
    e.add_op("r", r);
    e.add_op(
        "r-e11e11",
        LinearOp::from_fn(2, 2, Role::Algebra, Role::Algebra, |a, b| {
            if (a, b) == (1, 1) {
                int(1)
            } else {
                Rational::zero()
            }
        }),
    );
    e.add_op("pairing", hyperbolic_pairing(2));
    e.classes.push(("T".into(), StructureClass::Twilled));
    e.claims.push(Claim::new(Identity::Associativity, "matrix-units"));
    e.claims
        .push(Claim::new(Identity::Grb, "matrix-units").module("dual").op("pi"));
    e.claims.push(Claim::new(Identity::Aybe, "matrix-units").op("r"));
    e.claims
        .push(Claim::new(Identity::Aybe, "matrix-units").op("r-e11e11").expect(false));
    e.claims.push(Claim::new(Identity::Invariance, "T").op("pairing"));
    Ok(e)
}

/// Polynomial-type model: algebra, canonical module, integral `π`, `Ω`, `N = πΩ`.
fn integral_model(e: &mut CatalogEntry, name: &str, alg: Algebra, omega: &[Rational]) -> Result<()> {
    let n = alg.dim();
    let a = e.add_algebra(name, alg);
    e.modules
        .push(("canonical".into(), name.into(), Bimodule::canonical(a)?));
    let pi = integral(n, Role::Module, Role::Algebra);
    let om = omega_derivative(n, omega, Role::Algebra, Role::Module);
    let nn = pi.compose(&om)?.with_roles(Role::Algebra, Role::Algebra);
    e.add_op("J", integral(n, Role::Algebra, Role::Algebra));
    e.add_op("pi", pi);
    e.add_op("omega", om);
    e.add_op("N", nn);
    Ok(())
}

fn parse_coeffs(p: &mut Params, name: &str, default: &str) -> Result<Vec<Rational>> {
    let v = p.raw(name, default);
    v.split(',')
        .map(|s| {
            rational::parse(s).map_err(|err| Error::ParamOutOfRange {
                name: name.into(),
                message: err.to_string(),
            })
        })
        .collect()
}

fn poly_integral(p: &mut Params) -> Result<CatalogEntry> {
    let mut e = CatalogEntry::new("poly-integral", BTreeMap::new());
    let n = p.usize_in("N", DEFAULT_N, 4, MAX_N)?;
    let omega = parse_coeffs(p, "omega", "0,1")?;
    if omega.first().is_some_and(|c| !c.is_zero()) {
        return Err(Error::ParamOutOfRange {
            name: "omega".into(),
            message: "omega must vanish at 0 so that N does not lower degrees".into(),
        });
    }
    integral_model(&mut e, "poly", truncated_poly(n), &omega)?;
    e.add_op("id", LinearOp::identity(n, Role::Algebra));
    // J appears at most twice in a term.
    let rb_bound = DegreeBound::total(safe_total(n, 2));
    let low = DegreeBound::each(2);
    e.claims
        .push(Claim::new(Identity::Rb, "poly").op("J").weight(int(0)).bound(rb_bound));
    e.claims.push(Claim::new(Identity::Rb, "poly").op("id").weight(int(-1)));
    e.claims
        .push(Claim::new(Identity::Rb, "poly").op("id").weight(int(0)).expect(false));
    e.claims.push(
        Claim::new(Identity::Grb, "poly")
            .module("canonical")
            .op("pi")
            .bound(rb_bound),
    );
    e.claims
        .push(Claim::new(Identity::Nijenhuis, "poly").op("N").bound(low));
    e.claims.push(
        Claim::new(Identity::NijenhuisChain, "poly")
            .module("canonical")
            .op("pi")
            .op2("omega")
            .bound(low),
    );
    Ok(e)
}

fn poly_split_rb(p: &mut Params) -> Result<CatalogEntry> {
    let mut e = CatalogEntry::new("poly-split-rb", BTreeMap::new());
    let n = p.usize_in("N", DEFAULT_N, 2, MAX_N)?;
    let q = p.rational("q", "2")?;
    let base = e.add_algebra("poly", truncated_poly(n));
    let big_q = &q * &q * frac(1, 4);
    e.add_algebra("T", double(&base, &Rational::zero(), &big_q));
    e.add_op("R", augmentation_rb(n, &q, Role::Algebra, Role::Algebra));
    let half_q = LinearOp::scalar(n, &(&q * frac(1, 2)), Role::A2, Role::A1);
    let b = augmentation_rb(n, &q, Role::A2, Role::A1).add(&half_q)?;
    e.add_op("B", b);
    // R and B keep degrees, so only the product itself must stay below N.
    let bound = DegreeBound::total(safe_total(n, 0));
    e.classes.push((
        "T".into(),
        if big_q.is_zero() {
            StructureClass::Twilled
        } else {
            StructureClass::QuasiPhi1Zero
        },
    ));
    e.claims
        .push(Claim::new(Identity::Rb, "poly").op("R").weight(q).bound(bound));
    e.claims.push(Claim::new(Identity::Qmc, "T").op("B").bound(bound));
    Ok(e)
}

fn formal_series(p: &mut Params) -> Result<CatalogEntry> {
    let mut e = CatalogEntry::new("formal-series", BTreeMap::new());
    let n = p.usize_in("N", DEFAULT_N, 4, MAX_N)?;
    let z = p.rational("z", "1")?;
    let k = p.usize_in("k", 1, 1, 3)?;
    let mut omega = vec![Rational::zero(); k + 1];
    omega[k] = z;
    let alg = truncated_poly(n).with_name(format!("Q[nu]/nu^{n}"));
    let alg = alg.with_basis(labels("nu", n))?;
    integral_model(&mut e, "series", alg, &omega)?;
    let low = DegreeBound::each(2);
    e.claims
        .push(Claim::new(Identity::Nijenhuis, "series").op("N").bound(low));
    e.claims.push(
        Claim::new(Identity::NijenhuisChain, "series")
            .module("canonical")
            .op("pi")
            .op2("omega")
            .bound(low),
    );
    Ok(e)
}

fn reynolds(p: &mut Params) -> Result<CatalogEntry> {
    let mut e = CatalogEntry::new("reynolds", BTreeMap::new());
    let n = p.usize_in("n", 3, 1, MAX_BASE_DIM)?;
    let base = e.add_algebra("pointwise", pointwise(n));
    // (a,x)(b,y) = (ab, ay + xb − ab): semidirect product plus φ1(a,b) = −ab.
    let mut products = Vec::new();
    for (i, j, k, c) in base.products() {
        products.push((i, j, k, c.clone()));
        products.push((i, n + j, n + k, c.clone()));
        products.push((n + i, j, n + k, c.clone()));
        products.push((i, j, n + k, -c));
    }
    let mut basis: Vec<String> = base.basis_labels().iter().map(|l| format!("({l},0)")).collect();
    basis.extend(base.basis_labels().iter().map(|l| format!("(0,{l})")));
    let t = Algebra::new("reynolds", basis, products)?
        .with_split(n)?
        .with_degrees(vec![0; 2 * n])?;
    e.add_algebra("T", t);
    let mean = |d, c| LinearOp::from_fn(n, n, d, c, |_, _| frac(1, n as i64));
    e.add_op("H", mean(Role::A2, Role::A1));
    e.add_op("R", mean(Role::Algebra, Role::Algebra));
    e.add_op(
        "H-bad",
        LinearOp::from_fn(n, n, Role::A2, Role::A1, |r, c| {
            if r == c {
                int(r as i64 + 2)
            } else {
                Rational::zero()
            }
        }),
    );
    e.classes.push(("T".into(), StructureClass::QuasiPhi2Zero));
    e.claims.push(Claim::new(Identity::Associativity, "T"));
    e.claims.push(Claim::new(Identity::Tmc, "T").op("H"));
    e.claims.push(Claim::new(Identity::Tmc, "T").op("H-bad").expect(false));
    e.claims.push(Claim::new(Identity::Induced, "T").op("H"));
    Ok(e)
}

/// `∫dx: ∂^i x^j ↦ ∂^i x^{j+1}/(j+1)`, dropping terms that leave the basis.
pub fn weyl_integral(n: usize, domain: Role, codomain: Role) -> LinearOp {
    let basis = weyl_basis(n);
    let d = basis.len();
    let mut op = LinearOp::zero(d, d, domain, codomain);
    for (c, &(i, j)) in basis.iter().enumerate() {
        if let Some(r) = basis.iter().position(|&b| b == (i, j + 1)) {
            op.set(r, c, frac(1, j as i64 + 1));
        }
    }
    op
}

/// `u ↦ [∂, u]`: `∂^i x^j ↦ j ∂^i x^{j−1}`.
pub fn weyl_commutator(n: usize, domain: Role, codomain: Role) -> LinearOp {
    let basis = weyl_basis(n);
    let d = basis.len();
    let mut op = LinearOp::zero(d, d, domain, codomain);
    for (c, &(i, j)) in basis.iter().enumerate() {
        if j > 0 {
            let r = basis.iter().position(|&b| b == (i, j - 1)).expect("lower degree");
            op.set(r, c, int(j as i64));
        }
    }
    op
}

fn weyl_entry(p: &mut Params) -> Result<CatalogEntry> {
    let mut e = CatalogEntry::new("weyl", BTreeMap::new());
    let n = p.usize_in("N", DEFAULT_N, 3, MAX_WEYL_N)?;
    let a = e.add_algebra("weyl", weyl(n));
    e.modules
        .push(("canonical".into(), "weyl".into(), Bimodule::canonical(a)?));
    let pi = weyl_integral(n, Role::Module, Role::Algebra);
    let om = weyl_commutator(n, Role::Algebra, Role::Module);
    e.add_op("N", pi.compose(&om)?.with_roles(Role::Algebra, Role::Algebra));
    e.add_op("pi", pi);
    e.add_op("omega", om);
    // Products never raise the degree and N keeps it; the integral raises it
    // by one and appears at most twice in a term.
    e.claims.push(
        Claim::new(Identity::Nijenhuis, "weyl")
            .op("N")
            .bound(DegreeBound::total(safe_total(n, 0))),
    );
    e.claims.push(
        Claim::new(Identity::NijenhuisChain, "weyl")
            .module("canonical")
            .op("pi")
            .op2("omega")
            .bound(DegreeBound::total(safe_total(n, 2))),
    );
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsoReport {
    /// `(a, x) ↦ (a + (q/2)x, x)` on the total space.
    pub map: LinearOp,
    /// `(q/2)·id: A2 → A1`
    pub h: LinearOp,
    pub bowtie: Algebra,
    pub oplus: Algebra,
    /// Twisting `A ⊕_{q²/4} A` by `h` gives `A ⋈_q A`.
    pub twist_matches: bool,
    /// `1 + h` intertwines the twisted and the original product.
    pub twist_isomorphism: bool,
    /// `map` is multiplicative from `A ⋈_q A` to `A ⊕_{q²/4} A`, checked on
    /// basis pairs with the two multiplication tables directly.
    pub direct: bool,
}

impl IsoReport {
    pub fn holds(&self) -> bool {
        self.twist_matches && self.twist_isomorphism && self.direct
    }
}

/// The isomorphism `A ⋈_q A → A ⊕_{q²/4} A`.
pub fn iso_q_to_big_q(base: &Algebra, q: &Rational) -> Result<IsoReport> {
    let n = base.dim();
    let half = q * frac(1, 2);
    let big_q = &half * &half;
    let bowtie = double(base, q, &Rational::zero());
    let oplus = double(base, &Rational::zero(), &big_q);
    let h = LinearOp::scalar(n, &half, Role::A2, Role::A1);
    let map = LinearOp::from_fn(2 * n, 2 * n, Role::Total, Role::Total, |r, c| {
        if r == c {
            rational::one()
        } else if r + n == c {
            half.clone()
        } else {
            Rational::zero()
        }
    });
    let split = oplus.split().expect("double records its split");
    let ps = decompose_structure(&split, &oplus.structure_cochain())?;
    let twisted = twist_series(&ps, &h)?;
    let twist_matches = twisted.total() == bowtie.structure_cochain();
    let twist_isomorphism = check_twist_isomorphism(&ps, &h)?.holds;
    let d = 2 * n;
    let mut direct = true;
    for s in 0..d {
        for t in 0..d {
            let lhs = map.apply(&bowtie.mul_basis(s, t));
            let rhs = oplus.mul(&map.column(s), &map.column(t));
            direct &= lhs == rhs;
        }
    }
    Ok(IsoReport {
        map,
        h,
        bowtie,
        oplus,
        twist_matches,
        twist_isomorphism,
        direct,
    })
}
