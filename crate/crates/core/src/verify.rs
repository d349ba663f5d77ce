//! One entry point for every identity the verifiers know, keyed by name. The
//! command-line front end and the catalog both go through [`verify`], so a
//! verdict computed from files matches the one computed in memory.

use std::fmt;
use std::str::FromStr;

use crate::algebra::{check_associativity, check_invariance, Algebra, Bimodule, LinearOp};
use crate::bigraded::{decompose_structure, ProtoStructure, SplitContext};
use crate::error::{Error, Result};
use crate::filter::{DegreeBound, InputFilter};
use crate::operators::{
    check_aybe, check_grb, check_mc, check_nijenhuis, check_qmc, check_rb, check_tmc, induced_product, make_nijenhuis,
    CurvatureReport, GrbReport, NijenhuisReport, OperatorVerdict,
};
use crate::rational::{self, Rational};
use crate::twisting::check_twist_isomorphism;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Identity {
    Associativity,
    Rb,
    Grb,
    Mc,
    StrongMc,
    Tmc,
    Qmc,
    Aybe,
    Nijenhuis,
    NijenhuisChain,
    Induced,
    TwistIso,
    Invariance,
}

impl Identity {
    pub const ALL: [Identity; 13] = [
        Identity::Associativity,
        Identity::Rb,
        Identity::Grb,
        Identity::Mc,
        Identity::StrongMc,
        Identity::Tmc,
        Identity::Qmc,
        Identity::Aybe,
        Identity::Nijenhuis,
        Identity::NijenhuisChain,
        Identity::Induced,
        Identity::TwistIso,
        Identity::Invariance,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Identity::Associativity => "associativity",
            Identity::Rb => "rb",
            Identity::Grb => "grb",
            Identity::Mc => "mc",
            Identity::StrongMc => "strong-mc",
            Identity::Tmc => "tmc",
            Identity::Qmc => "qmc",
            Identity::Aybe => "aybe",
            Identity::Nijenhuis => "nijenhuis",
            Identity::NijenhuisChain => "nijenhuis-chain",
            Identity::Induced => "induced",
            Identity::TwistIso => "twist-iso",
            Identity::Invariance => "invariance",
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Identity::ALL
            .into_iter()
            .find(|i| i.as_str() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown identity `{s}`")))
    }
}

/// Everything a verification may read. Which fields are required depends on
/// the identity; missing ones are reported as precondition errors.
#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyInputs<'a> {
    pub algebra: Option<&'a Algebra>,
    pub module: Option<&'a Bimodule>,
    pub op: Option<&'a LinearOp>,
    pub op2: Option<&'a LinearOp>,
    pub weight: Option<&'a Rational>,
    /// Overrides the split recorded in the algebra.
    pub split: Option<usize>,
    pub bound: DegreeBound,
}

/// One named sub-check of an outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    pub verdict: Option<OperatorVerdict>,
}

impl Check {
    fn verdict(name: impl Into<String>, v: OperatorVerdict) -> Self {
        Check {
            name: name.into(),
            holds: v.holds,
            verdict: Some(v),
        }
    }

    fn flag(name: impl Into<String>, holds: bool) -> Self {
        Check {
            name: name.into(),
            holds,
            verdict: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub identity: Identity,
    pub holds: bool,
    pub checks: Vec<Check>,
    /// Facts reported alongside the checks that do not affect `holds`.
    pub info: Vec<(String, String)>,
}

impl VerifyOutcome {
    fn new(identity: Identity, checks: Vec<Check>, info: Vec<(String, String)>) -> Self {
        VerifyOutcome {
            identity,
            holds: checks.iter().all(|c| c.holds),
            checks,
            info,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn need<'a, T>(x: Option<&'a T>, what: &str, identity: Identity) -> Result<&'a T> {
    x.ok_or_else(|| Error::Precondition(format!("`{identity}` needs {what}")))
}

fn structure(alg: &Algebra, split: Option<usize>) -> Result<ProtoStructure> {
    let split = match split {
        Some(n1) if n1 <= alg.dim() => SplitContext::new(n1, alg.dim() - n1),
        Some(n1) => {
            return Err(Error::DimensionMismatch(format!(
                "split {n1} exceeds dimension {}",
                alg.dim()
            )))
        }
        None => alg
            .split()
            .ok_or_else(|| Error::Precondition("algebra records no split; pass one".into()))?,
    };
    decompose_structure(&split, &alg.structure_cochain())
}

fn grb_checks(prefix: &str, r: GrbReport) -> Vec<Check> {
    vec![
        Check::flag(format!("{prefix}bracket-route-agrees"), r.bracket_route_agrees),
        Check::verdict(format!("{prefix}generalized-rota-baxter"), r.verdict),
    ]
}

fn curvature_checks(r: CurvatureReport) -> Vec<Check> {
    let mut out = vec![
        Check::verdict(r.kind.identity_name(), r.verdict),
        Check::flag("bracket-route-agrees", r.bracket_route_agrees),
    ];
    if let Some(s) = r.strong {
        out.push(Check::verdict("strong-derivation", s.derivation));
        out.push(Check::verdict("strong-bracket", s.bracket_term));
    }
    out
}

fn nijenhuis_checks(r: NijenhuisReport) -> Vec<Check> {
    let mut out = vec![
        Check::verdict("nijenhuis", r.identity),
        Check::verdict("deformed-associativity", r.deformed_associative),
    ];
    for (t, v) in r.pencil {
        out.push(Check::verdict(
            format!("pencil-associativity t={}", rational::format(&t)),
            v,
        ));
    }
    out
}

pub fn verify(identity: Identity, inputs: &VerifyInputs<'_>) -> Result<VerifyOutcome> {
    let alg = need(inputs.algebra, "an algebra", identity)?;
    let bound = inputs.bound;
    let alg_filter = || InputFilter::from_parts(alg.degrees(), bound, "algebra");
    let a2_filter = |ps: &ProtoStructure| -> Result<Option<InputFilter>> {
        let n1 = ps.split().dim1();
        InputFilter::from_parts(alg.degrees().map(|d| &d[n1..]), bound, "A2")
    };
    let mut info = Vec::new();
    let checks = match identity {
        Identity::Associativity => {
            let rep = check_associativity(alg);
            vec![Check::flag("associativity", rep.holds)]
        }
        Identity::Rb => {
            let r = need(inputs.op, "an operator", identity)?;
            let zero = rational::zero();
            let q = inputs.weight.unwrap_or(&zero);
            vec![Check::verdict(
                "rota-baxter",
                check_rb(alg, r, q, alg_filter()?.as_ref())?,
            )]
        }
        Identity::Grb => {
            let m = need(inputs.module, "a bimodule", identity)?;
            let pi = need(inputs.op, "an operator", identity)?;
            let f = InputFilter::from_parts(m.degrees(), bound, "module")?;
            grb_checks("", check_grb(alg, m, pi, f.as_ref())?)
        }
        Identity::Mc | Identity::StrongMc | Identity::Tmc | Identity::Qmc => {
            let h = need(inputs.op, "an operator", identity)?;
            let ps = structure(alg, inputs.split)?;
            let f = a2_filter(&ps)?;
            let rep = match identity {
                Identity::Mc => check_mc(&ps, h, false, f.as_ref())?,
                Identity::StrongMc => check_mc(&ps, h, true, f.as_ref())?,
                Identity::Tmc => check_tmc(&ps, h, f.as_ref())?,
                _ => check_qmc(&ps, h, f.as_ref())?,
            };
            curvature_checks(rep)
        }
        Identity::Induced => {
            let h = need(inputs.op, "an operator", identity)?;
            let ps = structure(alg, inputs.split)?;
            let f = a2_filter(&ps)?;
            let rep = induced_product(&ps, h, f.as_ref())?;
            let mut out = curvature_checks(rep.matching);
            out.push(Check::flag("agrees-with-twist", rep.agrees_with_twist));
            out.push(Check::verdict("induced-associativity", rep.associativity));
            out
        }
        Identity::TwistIso => {
            let h = need(inputs.op, "an operator", identity)?;
            let ps = structure(alg, inputs.split)?;
            vec![Check::flag("twist-isomorphism", check_twist_isomorphism(&ps, h)?.holds)]
        }
        Identity::Aybe => {
            let r = need(inputs.op, "an operator", identity)?;
            let rep = check_aybe(alg, r)?;
            info.push(("skew".into(), rep.skew.to_string()));
            vec![Check::verdict("aybe", rep.verdict)]
        }
        Identity::Nijenhuis => {
            let n = need(inputs.op, "an operator", identity)?;
            nijenhuis_checks(check_nijenhuis(alg, n, alg_filter()?.as_ref())?)
        }
        Identity::NijenhuisChain => {
            let m = need(inputs.module, "a bimodule", identity)?;
            let pi = need(inputs.op, "an operator pi", identity)?;
            let omega = need(inputs.op2, "a second operator Omega", identity)?;
            let fa = alg_filter()?;
            let fm = InputFilter::from_parts(m.degrees(), bound, "module")?;
            let b = make_nijenhuis(alg, m, pi, omega, fa.as_ref(), fm.as_ref())?;
            let mut out = nijenhuis_checks(b.nijenhuis);
            out.extend(grb_checks("n-pi ", b.n_pi_grb));
            out.push(Check::verdict("compatibility", b.compatibility));
            for (t, r) in b.pencil_grb {
                out.extend(grb_checks(&format!("pi+{}n-pi ", rational::format(&t)), r));
            }
            out
        }
        Identity::Invariance => {
            let p = need(inputs.op, "a pairing", identity)?;
            vec![Check::flag("invariance", check_invariance(alg, p)?.holds)]
        }
    };
    Ok(VerifyOutcome::new(identity, checks, info))
}
