//! Twisting a multiplication `θ` on `A1 ⊕ A2` by a linear map `H: A2 → A1`
//! (or `A1 → A2`): `θᴴ = exp(X_Ĥ)(θ)` with `X_Ĥ(f) = {f, Ĥ}`.
//!
//! Three independent evaluations are provided: the exponential series, the
//! closed form `(1 − Ĥ) θ ((1 + Ĥ) ⊗ (1 + Ĥ))` built from plain insertions, and
//! the part-by-part formulas for the four homogeneous pieces.

use crate::algebra::{LinearOp, Role};
use crate::bigraded::{
    bidegree_of, classify, decompose_structure, lift_op, ProtoStructure, StructureClass, MU1, MU2, PHI1, PHI2,
};
use crate::cochain::{comp_i, derived_bracket, g_bracket, tribracket, Cochain};
use crate::error::{Error, Result};
use crate::rational::frac;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistReport {
    pub input: ProtoStructure,
    pub h: LinearOp,
    pub series: ProtoStructure,
    pub closed: ProtoStructure,
    pub formula: ProtoStructure,
    /// `d_{μ̂2}Ĥ + ½[Ĥ,Ĥ]_{μ̂1}`, computed in the frame where `H: A2 → A1`.
    pub curvature: Cochain,
    pub agree: bool,
}

impl TwistReport {
    pub fn result(&self) -> &ProtoStructure {
        &self.series
    }

    pub fn class(&self) -> StructureClass {
        classify(&self.series)
    }
}

fn direction(h: &LinearOp) -> Result<bool> {
    match h.roles() {
        (Role::A2, Role::A1) => Ok(false),
        (Role::A1, Role::A2) => Ok(true),
        found => Err(Error::role((Role::A2, Role::A1), found)),
    }
}

/// `θ + {θ,Ĥ} + ½{{θ,Ĥ},Ĥ} + ⅙{{{θ,Ĥ},Ĥ},Ĥ}`; the next term is checked to vanish.
pub fn twist_series(ps: &ProtoStructure, h: &LinearOp) -> Result<ProtoStructure> {
    let split = ps.split();
    let hat = lift_op(split, h)?;
    let theta = ps.total();
    let x1 = g_bracket(&theta, &hat)?;
    let x2 = g_bracket(&x1, &hat)?;
    let x3 = g_bracket(&x2, &hat)?;
    if !g_bracket(&x3, &hat)?.is_zero() {
        return Err(Error::Internal("fourth power of X_H does not vanish".into()));
    }
    let sum = theta + x1 + x2.scale(&frac(1, 2)) + x3.scale(&frac(1, 6));
    decompose_structure(split, &sum)
}

/// `(1 − Ĥ) ∘ θ ∘ ((1 + Ĥ) ⊗ (1 + Ĥ))` expanded into its eight insertion terms.
pub fn twist_closed_form(ps: &ProtoStructure, h: &LinearOp) -> Result<ProtoStructure> {
    let split = ps.split();
    let hat = lift_op(split, h)?;
    let theta = ps.total();
    let t1 = comp_i(&theta, &hat, 1)?;
    let t2 = comp_i(&theta, &hat, 2)?;
    let t12 = comp_i(&t1, &hat, 2)?;
    let inner = &(&(&theta + &t1) + &t2) + &t12;
    let outer = comp_i(&hat, &inner, 1)?;
    decompose_structure(split, &(inner - outer))
}

/// The four parts of `θᴴ`, each from its own formula, plus the curvature.
fn substructures_a2_to_a1(ps: &ProtoStructure, hat: &Cochain) -> Result<(ProtoStructure, Cochain)> {
    let split = ps.split();
    let half = frac(1, 2);
    let sixth = frac(1, 6);
    let (p1, m1, m2, p2) = (&ps.phi1, &ps.mu1, &ps.mu2, &ps.phi2);

    let phi1 = p1.clone();
    let mu1 = m1 + &g_bracket(p1, hat)?;
    let p1h = g_bracket(p1, hat)?;
    let mu2 = &(m2 + &g_bracket(m1, hat)?) + &g_bracket(&p1h, hat)?.scale(&half);
    let curvature = g_bracket(m2, hat)? + derived_bracket(m1, hat, hat)?.scale(&half);
    let phi2 = &(p2 + &curvature) + &tribracket(p1, hat, hat, hat)?.scale(&sixth);

    for (name, c, b) in [
        ("phi1", &phi1, PHI1),
        ("mu1", &mu1, MU1),
        ("mu2", &mu2, MU2),
        ("phi2", &phi2, PHI2),
    ] {
        if !bidegree_of(split, c)?.fits(b) {
            return Err(Error::Internal(format!("twisted {name} is not of bidegree {b}")));
        }
    }
    Ok((ProtoStructure::new(*split, phi1, mu1, mu2, phi2)?, curvature))
}

fn substructures_with_curvature(ps: &ProtoStructure, h: &LinearOp) -> Result<(ProtoStructure, Cochain)> {
    if !direction(h)? {
        let hat = lift_op(ps.split(), h)?;
        return substructures_a2_to_a1(ps, &hat);
    }
    // H: A1 → A2 is H: A2' → A1' on the mirrored split A1' ⊕ A2' = A2 ⊕ A1.
    let (mirror, perm) = ps.mirrored();
    let h_mirror = h.clone().with_roles(Role::A2, Role::A1);
    let hat = lift_op(mirror.split(), &h_mirror)?;
    let (twisted, curvature) = substructures_a2_to_a1(&mirror, &hat)?;
    let (back, _) = twisted.mirrored();
    let mut inverse = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inverse[old] = new;
    }
    Ok((back, curvature.permute_basis(&inverse)))
}

/// `φ1ᴴ = φ1`, `μ1ᴴ = μ1 + {φ1,Ĥ}`, `μ2ᴴ = μ2 + {μ1,Ĥ} + ½{{φ1,Ĥ},Ĥ}`,
/// `φ2ᴴ = φ2 + {μ2,Ĥ} + ½[Ĥ,Ĥ]_{μ1} + ⅙[Ĥ,Ĥ,Ĥ]_{φ1}`.
pub fn twist_substructures(ps: &ProtoStructure, h: &LinearOp) -> Result<ProtoStructure> {
    Ok(substructures_with_curvature(ps, h)?.0)
}

/// All three evaluations and whether they agree.
pub fn twist(ps: &ProtoStructure, h: &LinearOp) -> Result<TwistReport> {
    let series = twist_series(ps, h)?;
    let closed = twist_closed_form(ps, h)?;
    let (formula, curvature) = substructures_with_curvature(ps, h)?;
    let agree = series == closed && closed == formula;
    Ok(TwistReport {
        input: ps.clone(),
        h: h.clone(),
        series,
        closed,
        formula,
        curvature,
        agree,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsomorphismReport {
    pub holds: bool,
    /// First basis pair `(s, t)` where the two sides differ.
    pub witness: Option<[usize; 2]>,
}

/// Checks that `1 + H` maps `(T, θᴴ)` onto `(T, θ)`:
/// `(1+Ĥ) θᴴ(s,t) = θ((1+Ĥ)s, (1+Ĥ)t)` on all basis pairs.
pub fn check_twist_isomorphism(ps: &ProtoStructure, h: &LinearOp) -> Result<IsomorphismReport> {
    let theta = ps.total();
    if !g_bracket(&theta, &theta)?.is_zero() {
        return Err(Error::Precondition("θ is not associative".into()));
    }
    let twisted = twist_series(ps, h)?.total();
    let hat = lift_op(ps.split(), h)?;
    let d = ps.dim();
    let exp = |v: &[crate::Rational]| -> Vec<crate::Rational> {
        let hv = hat.apply(&[v]);
        v.iter().zip(hv).map(|(a, b)| a + b).collect()
    };
    let images: Vec<_> = (0..d).map(|i| exp(&crate::algebra::unit(d, i))).collect();
    for s in 0..d {
        for t in 0..d {
            let lhs = exp(&twisted.apply_basis(&[s, t]));
            let rhs = theta.apply(&[&images[s], &images[t]]);
            if lhs != rhs {
                return Ok(IsomorphismReport {
                    holds: false,
                    witness: Some([s, t]),
                });
            }
        }
    }
    Ok(IsomorphismReport {
        holds: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigraded::SplitContext;
    use crate::rational::int;

    /// `(a,x)(b,y) = (ab + Q xy, ay + xb + q xy)` on `ℚ ⊕ ℚ`.
    fn dim1_structure(q: i64, big_q: i64) -> ProtoStructure {
        let theta = Cochain::from_entries(
            2,
            2,
            [
                (0, &[0, 0][..], int(1)),
                (1, &[0, 1][..], int(1)),
                (1, &[1, 0][..], int(1)),
                (1, &[1, 1][..], int(q)),
                (0, &[1, 1][..], int(big_q)),
            ],
        )
        .unwrap();
        decompose_structure(&SplitContext::new(1, 1), &theta).unwrap()
    }

    fn h(v: crate::Rational) -> LinearOp {
        LinearOp::scalar(1, &v, Role::A2, Role::A1)
    }

    #[test]
    fn zero_map_is_identity() {
        let ps = dim1_structure(3, 2);
        let rep = twist(&ps, &h(int(0))).unwrap();
        assert!(rep.agree);
        assert_eq!(rep.series, ps);
        assert!(check_twist_isomorphism(&ps, &h(int(0))).unwrap().holds);
    }

    #[test]
    fn curvature_of_semidirect() {
        // A ⋉ A with H = h: φ2ᴴ(x,y) = -h² xy.
        let ps = dim1_structure(0, 0);
        let rep = twist(&ps, &h(int(3))).unwrap();
        assert!(rep.agree);
        assert_eq!(rep.series.phi2.get(0, &[1, 1]), &int(-9));
        assert_eq!(rep.curvature, rep.series.phi2);
        assert_eq!(rep.series.mu2.get(1, &[1, 1]), &int(6));
    }

    #[test]
    fn square_root_twist() {
        // ⊕_{q²/4} twisted by q/2 is ⋈_q; here q = 2.
        let ps = dim1_structure(0, 1);
        let rep = twist(&ps, &h(int(1))).unwrap();
        assert!(rep.agree);
        assert_eq!(rep.series, dim1_structure(2, 0));
        assert!(check_twist_isomorphism(&ps, &h(int(1))).unwrap().holds);
    }

    #[test]
    fn opposite_direction_matches_series() {
        let ps = dim1_structure(2, 5);
        let k = LinearOp::scalar(1, &int(7), Role::A1, Role::A2);
        let rep = twist(&ps, &k).unwrap();
        assert!(rep.agree, "{rep:#?}");
        assert!(check_twist_isomorphism(&ps, &k).unwrap().holds);
    }

    #[test]
    fn wrong_roles_rejected() {
        let ps = dim1_structure(0, 0);
        let bad = LinearOp::identity(1, Role::Algebra);
        assert!(matches!(twist(&ps, &bad), Err(Error::RoleMismatch { .. })));
    }
}
