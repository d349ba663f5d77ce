//! Exact verifiers for operator identities: Rota-Baxter of weight `q`,
//! generalized Rota-Baxter over a bimodule, the Maurer-Cartan family on split
//! structures, the associative Yang-Baxter equation, Nijenhuis operators, and
//! the products these operators induce.
//!
//! Every verifier returns an [`OperatorVerdict`] carrying the full residual as
//! a cochain. Where an identity has both an elementwise form and a bracket
//! form, the two are computed by separate code paths and compared.

use num_traits::Zero;

use crate::algebra::{self, semidirect_product, unit, vec_add, vec_sub, Algebra, Bimodule, LinearOp, Role};
use crate::bigraded::{classify, lift_op, ProtoStructure, SplitContext, StructureClass};
use crate::cochain::{comp_i, derived_bracket, g_bracket, Cochain};
use crate::error::{Error, Result};
use crate::filter::{accepts, mask, DegreeBound, InputFilter};
use crate::rational::{frac, int, Rational};
use crate::twisting::twist_substructures;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorVerdict {
    pub identity: String,
    pub holds: bool,
    /// Left side minus right side on every checked input; zero elsewhere.
    pub residual: Cochain,
    /// First nonzero entry of the residual, `(out, in_1, …)`.
    pub witness: Option<Vec<usize>>,
    pub restricted_to: Option<DegreeBound>,
    /// Number of basis input tuples evaluated.
    pub checked_inputs: usize,
}

impl OperatorVerdict {
    fn from_residual(
        identity: impl Into<String>,
        residual: Cochain,
        filter: Option<&InputFilter>,
        checked_inputs: usize,
    ) -> Self {
        let witness = residual.first_nonzero();
        OperatorVerdict {
            identity: identity.into(),
            holds: witness.is_none(),
            residual,
            witness,
            restricted_to: filter.map(InputFilter::bound),
            checked_inputs,
        }
    }
}

/// Where an identity's inputs and outputs sit inside the residual's space.
struct Frame {
    dim: usize,
    in_offset: usize,
    in_dim: usize,
    out_offset: usize,
}

impl Frame {
    fn square(dim: usize) -> Self {
        Frame {
            dim,
            in_offset: 0,
            in_dim: dim,
            out_offset: 0,
        }
    }
}

/// Evaluates `eval` on every accepted tuple of local input indices and
/// places the local output vector into a residual cochain.
fn tabulate(
    identity: &str,
    frame: &Frame,
    arity: usize,
    filter: Option<&InputFilter>,
    mut eval: impl FnMut(&[usize]) -> Vec<Rational>,
) -> Result<OperatorVerdict> {
    let mut residual = Cochain::zero(frame.dim, arity)?;
    let mut checked = 0;
    let total = frame.in_dim.pow(arity as u32);
    let mut local = vec![0usize; arity];
    let mut global = vec![0usize; arity];
    for mut flat in 0..total {
        for slot in local.iter_mut().rev() {
            *slot = flat % frame.in_dim;
            flat /= frame.in_dim;
        }
        if !accepts(filter, &local) {
            continue;
        }
        checked += 1;
        let value = eval(&local);
        for (g, l) in global.iter_mut().zip(&local) {
            *g = frame.in_offset + l;
        }
        for (k, v) in value.into_iter().enumerate() {
            if !v.is_zero() {
                residual.set(frame.out_offset + k, &global, v);
            }
        }
    }
    Ok(OperatorVerdict::from_residual(identity, residual, filter, checked))
}

fn check_filter(filter: Option<&InputFilter>, dim: usize, space: &str) -> Result<()> {
    filter.map_or(Ok(()), |f| f.check_space(dim, space))
}

/// `θ(s, t)` for coordinate vectors, skipping zero coordinates.
fn eval2(theta: &Cochain, s: &[Rational], t: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); theta.dim()];
    for (i, si) in s.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
        for (j, tj) in t.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            let c = si * tj;
            for (k, o) in out.iter_mut().enumerate() {
                let v = theta.get(k, &[i, j]);
                if !v.is_zero() {
                    *o += v * &c;
                }
            }
        }
    }
    out
}

/// Associator `(xy)z − x(yz)` of an arity-2 cochain, masked by the filter on triples.
pub fn check_product_associativity(
    identity: &str,
    product: &Cochain,
    filter: Option<&InputFilter>,
) -> Result<OperatorVerdict> {
    if product.arity() != 2 {
        return Err(Error::DimensionMismatch("a product has arity 2".into()));
    }
    let d = product.dim();
    check_filter(filter, d, "product")?;
    let assoc = comp_i(product, product, 1)? - comp_i(product, product, 2)?;
    let checked = (0..d.pow(3))
        .filter(|&f| accepts(filter, &[f / (d * d), (f / d) % d, f % d]))
        .count();
    Ok(OperatorVerdict::from_residual(
        identity,
        mask(&assoc, 0, d, filter),
        filter,
        checked,
    ))
}

/// `R(x)R(y) − R(R(x)y + xR(y)) − qR(xy)` on basis pairs of `A`.
pub fn check_rb(alg: &Algebra, r: &LinearOp, q: &Rational, filter: Option<&InputFilter>) -> Result<OperatorVerdict> {
    let d = alg.dim();
    r.expect_shape(d, d, "Rota-Baxter operator")?;
    check_filter(filter, d, "algebra")?;
    tabulate("rota-baxter", &Frame::square(d), 2, filter, |ins| {
        let (i, j) = (ins[0], ins[1]);
        let (rx, ry) = (r.column(i), r.column(j));
        let mut res = alg.mul(&rx, &ry);
        let mut inner = alg.mul(&rx, &unit(d, j));
        vec_add(&mut inner, &alg.mul(&unit(d, i), &ry));
        vec_sub(&mut res, &r.apply(&inner));
        let xy = alg.mul_basis(i, j);
        vec_sub(&mut res, &algebra::vec_scale(&r.apply(&xy), q));
        res
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrbReport {
    /// Elementwise residual `π(m)π(n) − π(π(m)·n + m·π(n))`, as a cochain on
    /// `A ⊕ M` with inputs in `M` and output in `A`.
    pub verdict: OperatorVerdict,
    /// `½[π̂, π̂]_μ̂` on the same inputs.
    pub bracket_residual: Cochain,
    pub bracket_route_agrees: bool,
}

impl GrbReport {
    pub fn holds(&self) -> bool {
        self.verdict.holds && self.bracket_route_agrees
    }
}

fn same_algebra(alg: &Algebra, module: &Bimodule) -> Result<()> {
    if module.algebra().as_ref() != alg {
        return Err(Error::DimensionMismatch(
            "bimodule is defined over a different algebra".into(),
        ));
    }
    Ok(())
}

/// Generalized Rota-Baxter identity for `π: M → A`.
pub fn check_grb(alg: &Algebra, module: &Bimodule, pi: &LinearOp, filter: Option<&InputFilter>) -> Result<GrbReport> {
    same_algebra(alg, module)?;
    pi.expect_roles((Role::Module, Role::Algebra))?;
    let (a, m) = (alg.dim(), module.dim());
    pi.expect_shape(a, m, "generalized Rota-Baxter operator")?;
    check_filter(filter, m, "module")?;

    let frame = Frame {
        dim: a + m,
        in_offset: a,
        in_dim: m,
        out_offset: 0,
    };
    let verdict = tabulate("generalized-rota-baxter", &frame, 2, filter, |ins| {
        let (i, j) = (ins[0], ins[1]);
        let (pm, pn) = (pi.column(i), pi.column(j));
        let mut res = alg.mul(&pm, &pn);
        let mut inner = module.act_left(&pm, &unit(m, j));
        vec_add(&mut inner, &module.act_right(&unit(m, i), &pn));
        vec_sub(&mut res, &pi.apply(&inner));
        res
    })?;

    let split = SplitContext::new(a, m);
    let mu = semidirect_product(alg, module)?.structure_cochain();
    let pi_hat = lift_op(&split, &pi.clone().with_roles(Role::A2, Role::A1))?;
    let bracket = derived_bracket(&mu, &pi_hat, &pi_hat)?.scale(&frac(1, 2));
    let bracket_residual = mask(&bracket, a, m, filter);
    let bracket_route_agrees = bracket_residual == verdict.residual;
    Ok(GrbReport {
        verdict,
        bracket_residual,
        bracket_route_agrees,
    })
}

/// `[π̂, ρ̂]_μ̂ = {{μ̂, π̂}, ρ̂}` on `A ⋉ M` for two maps `M → A`.
pub fn check_grb_compatibility(
    alg: &Algebra,
    module: &Bimodule,
    pi: &LinearOp,
    rho: &LinearOp,
    filter: Option<&InputFilter>,
) -> Result<OperatorVerdict> {
    same_algebra(alg, module)?;
    let (a, m) = (alg.dim(), module.dim());
    for op in [pi, rho] {
        op.expect_roles((Role::Module, Role::Algebra))?;
        op.expect_shape(a, m, "generalized Rota-Baxter operator")?;
    }
    check_filter(filter, m, "module")?;
    let split = SplitContext::new(a, m);
    let mu = semidirect_product(alg, module)?.structure_cochain();
    let p = lift_op(&split, &pi.clone().with_roles(Role::A2, Role::A1))?;
    let r = lift_op(&split, &rho.clone().with_roles(Role::A2, Role::A1))?;
    let bracket = derived_bracket(&mu, &p, &r)?;
    let checked = (0..m * m).filter(|&f| accepts(filter, &[f / m, f % m])).count();
    Ok(OperatorVerdict::from_residual(
        "compatibility",
        mask(&bracket, a, m, filter),
        filter,
        checked,
    ))
}

/// Which equation of the Maurer-Cartan family a structure's class calls for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum McKind {
    /// Twilled input: the curvature vanishes.
    MaurerCartan,
    /// `φ2 = 0`: the twisted equation, with the extra `φ1(H(x), H(y))` term.
    Twisted,
    /// `φ1 = 0`: the curvature equals `−φ2`.
    Quasi,
}

impl McKind {
    pub fn identity_name(self) -> &'static str {
        match self {
            McKind::MaurerCartan => "maurer-cartan",
            McKind::Twisted => "twisted-maurer-cartan",
            McKind::Quasi => "quasi-maurer-cartan",
        }
    }

    pub fn for_class(class: StructureClass) -> Option<Self> {
        match class {
            StructureClass::Twilled => Some(McKind::MaurerCartan),
            StructureClass::QuasiPhi2Zero => Some(McKind::Twisted),
            StructureClass::QuasiPhi1Zero => Some(McKind::Quasi),
            StructureClass::Proto => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongMcReport {
    /// `H(x *2 y) − x *2 H(y) − H(x) *2 y`
    pub derivation: OperatorVerdict,
    /// `½[Ĥ, Ĥ]_{μ̂1}`
    pub bracket_term: OperatorVerdict,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureReport {
    pub kind: McKind,
    /// Elementwise residual on `A2 ⊗ A2 → A1`, as a cochain on the total space.
    pub verdict: OperatorVerdict,
    /// `φ2ᴴ` from the part-by-part twisting formulas, on the same inputs.
    pub bracket_residual: Cochain,
    pub bracket_route_agrees: bool,
    pub strong: Option<StrongMcReport>,
}

impl CurvatureReport {
    pub fn holds(&self) -> bool {
        self.verdict.holds && self.bracket_route_agrees && self.strong.as_ref().is_none_or(|s| s.holds)
    }
}

/// Images of `x + H(x)` for the basis of `A2`, as vectors on the total space.
fn shifted_basis(split: &SplitContext, h: &LinearOp) -> Vec<Vec<Rational>> {
    let (n1, n2) = (split.dim1(), split.dim2());
    (0..n2)
        .map(|i| {
            let mut v = h.column(i);
            v.extend((0..n2).map(|k| if k == i { int(1) } else { Rational::zero() }));
            v
        })
        .collect::<Vec<_>>()
        .into_iter()
        .inspect(|v| debug_assert_eq!(v.len(), n1 + n2))
        .collect()
}

fn expect_h(ps: &ProtoStructure, h: &LinearOp) -> Result<()> {
    h.expect_roles((Role::A2, Role::A1))?;
    h.expect_shape(ps.split().dim1(), ps.split().dim2(), "H")
}

/// The `A1` part of `θ(x + Hx, y + Hy)` minus `H` of its `A2` part, for
/// `x, y` in the basis of `A2`. Under each class's vanishing conditions this
/// is the left-minus-right side of the matching Maurer-Cartan type equation.
fn curvature_elementwise(
    ps: &ProtoStructure,
    h: &LinearOp,
    identity: &str,
    filter: Option<&InputFilter>,
) -> Result<OperatorVerdict> {
    let split = ps.split();
    let (n1, n2) = (split.dim1(), split.dim2());
    let theta = ps.total();
    let shifted = shifted_basis(split, h);
    let frame = Frame {
        dim: n1 + n2,
        in_offset: n1,
        in_dim: n2,
        out_offset: 0,
    };
    tabulate(identity, &frame, 2, filter, |ins| {
        let v = eval2(&theta, &shifted[ins[0]], &shifted[ins[1]]);
        let mut res = v[..n1].to_vec();
        vec_sub(&mut res, &h.apply(&v[n1..]));
        res
    })
}

fn curvature_report(
    ps: &ProtoStructure,
    h: &LinearOp,
    kind: McKind,
    filter: Option<&InputFilter>,
) -> Result<CurvatureReport> {
    expect_h(ps, h)?;
    let split = ps.split();
    check_filter(filter, split.dim2(), "A2")?;
    let verdict = curvature_elementwise(ps, h, kind.identity_name(), filter)?;
    let phi2h = twist_substructures(ps, h)?.phi2;
    let bracket_residual = mask(&phi2h, split.dim1(), split.dim2(), filter);
    let bracket_route_agrees = bracket_residual == verdict.residual;
    Ok(CurvatureReport {
        kind,
        verdict,
        bracket_residual,
        bracket_route_agrees,
        strong: None,
    })
}

fn wrong_class(expected: &str, ps: &ProtoStructure) -> Error {
    Error::WrongClass {
        expected: expected.into(),
        found: classify(ps).to_string(),
    }
}

/// Maurer-Cartan equation for `H: A2 → A1` on a twilled structure; with
/// `strong`, also the derivation and bracket parts separately.
pub fn check_mc(
    ps: &ProtoStructure,
    h: &LinearOp,
    strong: bool,
    filter: Option<&InputFilter>,
) -> Result<CurvatureReport> {
    if classify(ps) != StructureClass::Twilled {
        return Err(wrong_class("twilled", ps));
    }
    let mut report = curvature_report(ps, h, McKind::MaurerCartan, filter)?;
    if strong {
        let split = ps.split();
        let (n1, n2) = (split.dim1(), split.dim2());
        let shifted = shifted_basis(split, h);
        let frame = Frame {
            dim: n1 + n2,
            in_offset: n1,
            in_dim: n2,
            out_offset: 0,
        };
        let lift_h = |v: Vec<Rational>| -> Vec<Rational> {
            let mut out = v;
            out.extend((0..n2).map(|_| Rational::zero()));
            out
        };
        let derivation = tabulate("strong-derivation", &frame, 2, filter, |ins| {
            let x = unit(n1 + n2, n1 + ins[0]);
            let y = unit(n1 + n2, n1 + ins[1]);
            let hx = lift_h(shifted[ins[0]][..n1].to_vec());
            let hy = lift_h(shifted[ins[1]][..n1].to_vec());
            let xy = eval2(&ps.mu2, &x, &y);
            let mut res = h.apply(&xy[n1..]);
            vec_sub(&mut res, &eval2(&ps.mu2, &x, &hy)[..n1]);
            vec_sub(&mut res, &eval2(&ps.mu2, &hx, &y)[..n1]);
            res
        })?;
        let hat = lift_op(split, h)?;
        let term = derived_bracket(&ps.mu1, &hat, &hat)?.scale(&frac(1, 2));
        let bracket_term = OperatorVerdict::from_residual(
            "strong-bracket",
            mask(&term, n1, n2, filter),
            filter,
            derivation.checked_inputs,
        );
        let holds = derivation.holds && bracket_term.holds;
        report.strong = Some(StrongMcReport {
            derivation,
            bracket_term,
            holds,
        });
    }
    Ok(report)
}

/// Twisted Maurer-Cartan equation on a structure with `φ2 = 0`. With
/// `μ2 = 0` this is the twisted Rota-Baxter identity; with `φ1(a,b) = −ab`
/// the Reynolds identity.
pub fn check_tmc(ps: &ProtoStructure, h: &LinearOp, filter: Option<&InputFilter>) -> Result<CurvatureReport> {
    if !ps.phi2.is_zero() {
        return Err(wrong_class("quasi(phi2=0)", ps));
    }
    curvature_report(ps, h, McKind::Twisted, filter)
}

/// Quasi-Maurer-Cartan equation `d_{μ̂2}Ĥ + ½[Ĥ,Ĥ]_{μ̂1} = −φ̂2` on a
/// structure with `φ1 = 0`.
pub fn check_qmc(ps: &ProtoStructure, h: &LinearOp, filter: Option<&InputFilter>) -> Result<CurvatureReport> {
    if !ps.phi1.is_zero() {
        return Err(wrong_class("quasi(phi1=0)", ps));
    }
    curvature_report(ps, h, McKind::Quasi, filter)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedProduct {
    /// `x ×_H y` on `A2`, as a cochain over `A2` alone.
    pub product: Cochain,
    pub matching: CurvatureReport,
    pub associativity: OperatorVerdict,
    /// The product equals the `A2 ⊗ A2 → A2` block of `μ2ᴴ`.
    pub agrees_with_twist: bool,
}

/// The product `A2 ⊗ A2 → A2` that a solution `H` of the class's Maurer-Cartan
/// type equation induces: `φ1(Hx,Hy) + Hx *1 y + x *1 Hy + x *2 y`.
pub fn induced_product(ps: &ProtoStructure, h: &LinearOp, filter: Option<&InputFilter>) -> Result<InducedProduct> {
    let class = classify(ps);
    let kind = McKind::for_class(class).ok_or_else(|| wrong_class("twilled or quasi-twilled", ps))?;
    let matching = match kind {
        McKind::MaurerCartan => check_mc(ps, h, false, filter)?,
        McKind::Twisted => check_tmc(ps, h, filter)?,
        McKind::Quasi => check_qmc(ps, h, filter)?,
    };
    if !matching.holds() {
        return Err(Error::Precondition(format!(
            "{} fails for H; the induced product need not be associative",
            kind.identity_name()
        )));
    }
    let split = ps.split();
    let (n1, n2) = (split.dim1(), split.dim2());
    let theta = ps.total();
    let shifted = shifted_basis(split, h);
    let mu2h = twist_substructures(ps, h)?.mu2;
    let mut product = Cochain::zero(n2, 2)?;
    let mut agrees = true;
    for i in 0..n2 {
        for j in 0..n2 {
            let v = eval2(&theta, &shifted[i], &shifted[j]);
            for k in 0..n2 {
                agrees &= &v[n1 + k] == mu2h.get(n1 + k, &[n1 + i, n1 + j]);
                product.set(k, &[i, j], v[n1 + k].clone());
            }
        }
    }
    let associativity = check_product_associativity("induced-associativity", &product, filter)?;
    Ok(InducedProduct {
        product,
        matching,
        associativity,
        agrees_with_twist: agrees,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AybeReport {
    /// Residual tensor `r13 r12 − r12 r23 + r23 r13`; coefficient of
    /// `e_p ⊗ e_q ⊗ e_r` stored at cochain position `(p, q, r)`.
    pub verdict: OperatorVerdict,
    pub skew: bool,
}

/// Associative Yang-Baxter equation for `r = Σ R[a][b] e_a ⊗ e_b`.
pub fn check_aybe(alg: &Algebra, r: &LinearOp) -> Result<AybeReport> {
    let d = alg.dim();
    r.expect_shape(d, d, "r-matrix")?;
    if !alg.is_associative() {
        return Err(Error::Precondition("algebra is not associative".into()));
    }
    let rr = |a: usize, b: usize| r.get(a, b);
    let mut residual = Cochain::zero(d, 2)?;
    for (s, t, out, c) in alg.products() {
        // e_s e_t = … + c e_out
        for x in 0..d {
            for y in 0..d {
                // r13 r12: (e_s e_t) ⊗ e_y ⊗ e_x with R[s][x] R[t][y]
                let v = rr(s, x) * rr(t, y) * &c;
                if !v.is_zero() {
                    let cur = residual.get(out, &[y, x]) + v;
                    residual.set(out, &[y, x], cur);
                }
                // r12 r23: e_x ⊗ (e_s e_t) ⊗ e_y with R[x][s] R[t][y]
                let v = rr(x, s) * rr(t, y) * &c;
                if !v.is_zero() {
                    let cur = residual.get(x, &[out, y]) - v;
                    residual.set(x, &[out, y], cur);
                }
                // r23 r13: e_y ⊗ e_x ⊗ (e_s e_t) with R[x][s] R[y][t]
                let v = rr(x, s) * rr(y, t) * &c;
                if !v.is_zero() {
                    let cur = residual.get(y, &[x, out]) + v;
                    residual.set(y, &[x, out], cur);
                }
            }
        }
    }
    let neg = r.scale(&int(-1));
    let skew = r.transpose() == neg.with_roles(r.codomain(), r.domain());
    Ok(AybeReport {
        verdict: OperatorVerdict::from_residual("aybe", residual, None, d * d * d),
        skew,
    })
}

/// `x ×_N y = N(x)y + xN(y) − N(xy)`.
pub fn nijenhuis_product(alg: &Algebra, n: &LinearOp) -> Result<Cochain> {
    let d = alg.dim();
    n.expect_shape(d, d, "Nijenhuis operator")?;
    let mut out = Cochain::zero(d, 2)?;
    for i in 0..d {
        let nx = n.column(i);
        for j in 0..d {
            let ny = n.column(j);
            let mut v = alg.mul(&nx, &unit(d, j));
            vec_add(&mut v, &alg.mul(&unit(d, i), &ny));
            vec_sub(&mut v, &n.apply(&alg.mul_basis(i, j)));
            for (k, c) in v.into_iter().enumerate() {
                out.set(k, &[i, j], c);
            }
        }
    }
    Ok(out)
}

/// Parameters of the pencil `xy + t·(x ×_N y)`.
pub const PENCIL_T: [i64; 3] = [-1, 1, 2];
/// Parameters of the pencil `π + t·Nπ`.
pub const GRB_PENCIL_T: [i64; 3] = [1, 2, 3];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NijenhuisReport {
    pub identity: OperatorVerdict,
    pub deformed: Cochain,
    pub deformed_associative: OperatorVerdict,
    pub pencil: Vec<(Rational, OperatorVerdict)>,
}

impl NijenhuisReport {
    pub fn holds(&self) -> bool {
        self.identity.holds && self.deformed_associative.holds && self.pencil.iter().all(|(_, v)| v.holds)
    }
}

/// `N(x)N(y) − N(N(x)y + xN(y)) + N²(xy)`, plus associativity of `×_N` and of
/// the pencil `xy + t·(x ×_N y)`. Without a filter the algebra must be
/// associative; with one, associativity is only assumed on filtered inputs.
pub fn check_nijenhuis(alg: &Algebra, n: &LinearOp, filter: Option<&InputFilter>) -> Result<NijenhuisReport> {
    let d = alg.dim();
    n.expect_shape(d, d, "Nijenhuis operator")?;
    check_filter(filter, d, "algebra")?;
    if filter.is_none() && !alg.is_associative() {
        return Err(Error::Precondition("algebra is not associative".into()));
    }
    let identity = tabulate("nijenhuis", &Frame::square(d), 2, filter, |ins| {
        let (i, j) = (ins[0], ins[1]);
        let (nx, ny) = (n.column(i), n.column(j));
        let mut res = alg.mul(&nx, &ny);
        let mut inner = alg.mul(&nx, &unit(d, j));
        vec_add(&mut inner, &alg.mul(&unit(d, i), &ny));
        vec_sub(&mut res, &n.apply(&inner));
        let nxy = n.apply(&alg.mul_basis(i, j));
        vec_add(&mut res, &n.apply(&nxy));
        res
    })?;
    let deformed = nijenhuis_product(alg, n)?;
    let deformed_associative = check_product_associativity("nijenhuis-deformed-associativity", &deformed, filter)?;
    let mu = alg.structure_cochain();
    let pencil = PENCIL_T
        .iter()
        .map(|&t| {
            let t = int(t);
            let p = &mu + &deformed.scale(&t);
            let v = check_product_associativity("nijenhuis-pencil-associativity", &p, filter)?;
            Ok((t, v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NijenhuisReport {
        identity,
        deformed,
        deformed_associative,
        pencil,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NijenhuisBundle {
    /// `N = π ∘ Ω`
    pub n: LinearOp,
    pub nijenhuis: NijenhuisReport,
    /// `N ∘ π: M → A`
    pub n_pi: LinearOp,
    pub n_pi_grb: GrbReport,
    /// `[π̂, (Nπ)^]_μ̂ = 0`
    pub compatibility: OperatorVerdict,
    /// `π + t·Nπ` for `t` in [`GRB_PENCIL_T`].
    pub pencil_grb: Vec<(Rational, GrbReport)>,
}

impl NijenhuisBundle {
    pub fn holds(&self) -> bool {
        self.nijenhuis.holds()
            && self.n_pi_grb.holds()
            && self.compatibility.holds
            && self.pencil_grb.iter().all(|(_, r)| r.holds())
    }
}

/// `Ω(ab) − a·Ω(b) − Ω(a)·b` on basis pairs of `A`, as a cochain on `A ⊕ M`.
pub fn check_module_derivation(
    alg: &Algebra,
    module: &Bimodule,
    omega: &LinearOp,
    filter: Option<&InputFilter>,
) -> Result<OperatorVerdict> {
    same_algebra(alg, module)?;
    omega.expect_roles((Role::Algebra, Role::Module))?;
    let (a, m) = (alg.dim(), module.dim());
    omega.expect_shape(m, a, "Omega")?;
    check_filter(filter, a, "algebra")?;
    let frame = Frame {
        dim: a + m,
        in_offset: 0,
        in_dim: a,
        out_offset: a,
    };
    tabulate("module-derivation", &frame, 2, filter, |ins| {
        let (i, j) = (ins[0], ins[1]);
        let mut res = omega.apply(&alg.mul_basis(i, j));
        vec_sub(&mut res, &module.act_left(&unit(a, i), &omega.column(j)));
        vec_sub(&mut res, &module.act_right(&omega.column(i), &unit(a, j)));
        res
    })
}

/// `Ω(a) ×_π Ω(b) − Ω(Ω(a) ·_π b + a ·_π Ω(b))` where
/// `m ×_π n = π(m)·n + m·π(n)`, `m ·_π b = π(m)b − π(m·b)`,
/// `a ·_π n = aπ(n) − π(a·n)`.
pub fn check_twisted_derivation(
    alg: &Algebra,
    module: &Bimodule,
    pi: &LinearOp,
    omega: &LinearOp,
    filter: Option<&InputFilter>,
) -> Result<OperatorVerdict> {
    same_algebra(alg, module)?;
    pi.expect_roles((Role::Module, Role::Algebra))?;
    omega.expect_roles((Role::Algebra, Role::Module))?;
    let (a, m) = (alg.dim(), module.dim());
    pi.expect_shape(a, m, "pi")?;
    omega.expect_shape(m, a, "Omega")?;
    check_filter(filter, a, "algebra")?;
    let times_pi = |x: &[Rational], y: &[Rational]| {
        let mut v = module.act_left(&pi.apply(x), y);
        vec_add(&mut v, &module.act_right(x, &pi.apply(y)));
        v
    };
    let frame = Frame {
        dim: a + m,
        in_offset: 0,
        in_dim: a,
        out_offset: a,
    };
    tabulate("twisted-derivation", &frame, 2, filter, |ins| {
        let (ea, eb) = (unit(a, ins[0]), unit(a, ins[1]));
        let (oa, ob) = (omega.column(ins[0]), omega.column(ins[1]));
        let mut res = times_pi(&oa, &ob);
        // Ω(a) ·_π b
        let mut inner = alg.mul(&pi.apply(&oa), &eb);
        vec_sub(&mut inner, &pi.apply(&module.act_right(&oa, &eb)));
        // a ·_π Ω(b)
        vec_add(&mut inner, &alg.mul(&ea, &pi.apply(&ob)));
        vec_sub(&mut inner, &pi.apply(&module.act_left(&ea, &ob)));
        vec_sub(&mut res, &omega.apply(&inner));
        res
    })
}

/// Builds `N = π ∘ Ω` from a generalized Rota-Baxter operator `π: M → A` and
/// `Ω: A → M`, after checking that `π` is one and that `Ω` is a derivation
/// compatible with the `π`-twisted actions; then checks everything `N` should
/// satisfy. `filter_a` applies to inputs in `A`, `filter_m` to inputs in `M`.
pub fn make_nijenhuis(
    alg: &Algebra,
    module: &Bimodule,
    pi: &LinearOp,
    omega: &LinearOp,
    filter_a: Option<&InputFilter>,
    filter_m: Option<&InputFilter>,
) -> Result<NijenhuisBundle> {
    let grb = check_grb(alg, module, pi, filter_m)?;
    if !grb.holds() {
        return Err(Error::Precondition(format!(
            "pi is not a generalized Rota-Baxter operator (first defect at {:?})",
            grb.verdict.witness
        )));
    }
    let der = check_module_derivation(alg, module, omega, filter_a)?;
    if !der.holds {
        return Err(Error::Precondition(format!(
            "Omega is not a derivation A -> M (first defect at {:?})",
            der.witness
        )));
    }
    let tw = check_twisted_derivation(alg, module, pi, omega, filter_a)?;
    if !tw.holds {
        return Err(Error::Precondition(format!(
            "Omega is not a derivation for the pi-twisted actions (first defect at {:?})",
            tw.witness
        )));
    }
    let n = pi.compose(omega)?.with_roles(Role::Algebra, Role::Algebra);
    let nijenhuis = check_nijenhuis(alg, &n, filter_a)?;
    let n_pi = n.compose(pi)?.with_roles(Role::Module, Role::Algebra);
    let n_pi_grb = check_grb(alg, module, &n_pi, filter_m)?;
    let compatibility = check_grb_compatibility(alg, module, pi, &n_pi, filter_m)?;
    let pencil_grb = GRB_PENCIL_T
        .iter()
        .map(|&t| {
            let t = int(t);
            let op = pi.add(&n_pi.scale(&t))?;
            Ok((t, check_grb(alg, module, &op, filter_m)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NijenhuisBundle {
        n,
        nijenhuis,
        n_pi,
        n_pi_grb,
        compatibility,
        pencil_grb,
    })
}

/// `{S, S} = 0` for an arity-2 cochain, as a verdict.
pub fn check_structure(theta: &Cochain) -> Result<OperatorVerdict> {
    let d = theta.dim();
    let residual = g_bracket(theta, theta)?;
    Ok(OperatorVerdict::from_residual("structure", residual, None, d * d * d))
}
