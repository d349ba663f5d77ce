//! JSON interchange for algebras, bimodules, operators, cochains and reports.
//!
//! Rationals are strings `"p/q"` (integers may also be plain JSON numbers on
//! input). Every parse error names the JSON path and the offending key.

use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::algebra::{Algebra, AssociativityReport, Bimodule, LinearOp, Role};
use crate::bigraded::{Bidegree, BidegreeResult, ProtoConditionsReport, ProtoStructure, SplitContext};
use crate::cochain::Cochain;
use crate::error::{Error, Result};
use crate::filter::DegreeBound;
use crate::operators::OperatorVerdict;
use crate::rational::{self, Rational};
use crate::twisting::TwistReport;
use crate::verify::VerifyOutcome;

/// Version of every report document written by [`report`].
pub const SCHEMA_VERSION: u32 = 1;

/// A position inside a JSON document being read.
#[derive(Clone, Copy)]
struct Node<'a> {
    value: &'a Value,
    path: &'a str,
}

impl<'a> Node<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::schema(self.path, message)
    }

    /// Checks that this is an object with no keys outside `allowed`.
    fn object(&self, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
        let map = self.value.as_object().ok_or_else(|| self.err("expected an object"))?;
        if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::schema(format!("{}.{k}", self.path), "unexpected key"));
        }
        Ok(map)
    }

    fn array(&self) -> Result<&'a Vec<Value>> {
        self.value.as_array().ok_or_else(|| self.err("expected an array"))
    }

    fn usize(&self) -> Result<usize> {
        self.value
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| self.err("expected a non-negative integer"))
    }

    fn u32(&self) -> Result<u32> {
        self.value
            .as_u64()
            .and_then(|n| u32::try_from(n).ok())
            .ok_or_else(|| self.err("expected a non-negative 32-bit integer"))
    }

    fn str(&self) -> Result<&'a str> {
        self.value.as_str().ok_or_else(|| self.err("expected a string"))
    }

    fn rational(&self) -> Result<Rational> {
        match self.value {
            Value::String(s) => rational::parse(s).map_err(|_| self.err(format!("`{s}` is not a rational p/q"))),
            Value::Number(n) if n.is_i64() => Ok(rational::int(n.as_i64().expect("checked"))),
            _ => Err(self.err("expected a rational as a string \"p/q\" or an integer")),
        }
    }
}

/// Reads children with owned paths, since `Node` borrows its path.
fn with_child<T>(
    parent: Node<'_>,
    map: &Map<String, Value>,
    key: &str,
    f: impl FnOnce(Node<'_>) -> Result<T>,
) -> Result<T> {
    let path = format!("{}.{key}", parent.path);
    let value = map
        .get(key)
        .ok_or_else(|| Error::schema(&path, "missing required key"))?;
    f(Node { value, path: &path })
}

fn with_optional<T>(
    parent: Node<'_>,
    map: &Map<String, Value>,
    key: &str,
    f: impl FnOnce(Node<'_>) -> Result<T>,
) -> Result<Option<T>> {
    match map.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(value) => {
            let path = format!("{}.{key}", parent.path);
            f(Node { value, path: &path }).map(Some)
        }
    }
}

fn each<T>(node: Node<'_>, mut f: impl FnMut(Node<'_>) -> Result<T>) -> Result<Vec<T>> {
    node.array()?
        .iter()
        .enumerate()
        .map(|(i, value)| {
            let path = format!("{}[{i}]", node.path);
            f(Node { value, path: &path })
        })
        .collect()
}

/// `[a, b, ..., "p/q"]` with `n` leading indices.
fn indexed_entry(node: Node<'_>, n: usize) -> Result<(Vec<usize>, Rational)> {
    let items = node.array()?;
    if items.len() != n + 1 {
        return Err(node.err(format!("expected {n} indices followed by a coefficient")));
    }
    let mut idx = Vec::with_capacity(n);
    let mut coeff = None;
    for (i, value) in items.iter().enumerate() {
        let path = format!("{}[{i}]", node.path);
        let child = Node { value, path: &path };
        if i < n {
            idx.push(child.usize()?);
        } else {
            coeff = Some(child.rational()?);
        }
    }
    Ok((idx, coeff.expect("n + 1 items")))
}

fn check_range(path: &str, what: &str, idx: &[usize], bounds: &[usize]) -> Result<()> {
    for (i, (&x, &b)) in idx.iter().zip(bounds).enumerate() {
        if x >= b {
            return Err(Error::schema(
                format!("{path}[{i}]"),
                format!("{what} index {x} out of range (dimension {b})"),
            ));
        }
    }
    Ok(())
}

fn q(r: &Rational) -> Value {
    Value::String(rational::format(r))
}

fn degrees_of(node: Node<'_>, dim: usize) -> Result<Vec<u32>> {
    let d = each(node, |n| n.u32())?;
    if d.len() != dim {
        return Err(node.err(format!("expected {dim} degrees, found {}", d.len())));
    }
    Ok(d)
}

fn basis_of(node: Node<'_>, dim: usize) -> Result<Vec<String>> {
    let b = each(node, |n| n.str().map(String::from))?;
    if b.len() != dim {
        return Err(node.err(format!("expected {dim} basis labels, found {}", b.len())));
    }
    Ok(b)
}

fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::schema("$", format!("invalid JSON: {e}")))
}

pub fn algebra_to_json(alg: &Algebra) -> Value {
    let mut doc = json!({
        "name": alg.name(),
        "dim": alg.dim(),
        "basis": alg.basis_labels(),
        "products": alg.products().iter().map(|(i, j, k, c)| json!([i, j, k, q(c)])).collect::<Vec<_>>(),
    });
    if let Some(s) = alg.split() {
        doc["split"] = json!({ "dim1": s.dim1() });
    }
    if let Some(d) = alg.degrees() {
        doc["degrees"] = json!(d);
    }
    doc
}

pub fn algebra_from_json(value: &Value) -> Result<Algebra> {
    let root = Node { value, path: "$" };
    let map = root.object(&["name", "dim", "basis", "products", "split", "degrees"])?;
    let name = with_optional(root, map, "name", |n| n.str().map(String::from))?.unwrap_or_default();
    let dim = with_child(root, map, "dim", |n| n.usize())?;
    let basis = with_optional(root, map, "basis", |n| basis_of(n, dim))?
        .unwrap_or_else(|| (0..dim).map(|i| format!("e{i}")).collect());
    let products = with_child(root, map, "products", |n| {
        each(n, |e| {
            let (idx, c) = indexed_entry(e, 3)?;
            check_range(e.path, "basis", &idx, &[dim; 3])?;
            Ok((idx[0], idx[1], idx[2], c))
        })
    })?;
    let mut alg = Algebra::new(name, basis, products)?;
    if let Some(dim1) = with_optional(root, map, "split", |n| {
        let m = n.object(&["dim1"])?;
        with_child(n, m, "dim1", |d| d.usize())
    })? {
        if dim1 > dim {
            return Err(Error::schema("$.split.dim1", format!("exceeds dimension {dim}")));
        }
        alg = alg.with_split(dim1)?;
    }
    if let Some(d) = with_optional(root, map, "degrees", |n| degrees_of(n, dim))? {
        alg = alg.with_degrees(d)?;
    }
    Ok(alg)
}

pub fn algebra_from_str(text: &str) -> Result<Algebra> {
    algebra_from_json(&parse(text)?)
}

/// `algebra` names the algebra the module lives over; only its dimension is
/// checked on reading.
pub fn bimodule_to_json(module: &Bimodule, name: &str) -> Value {
    let mut doc = json!({
        "name": name,
        "algebra": module.algebra().name(),
        "algebra_dim": module.algebra().dim(),
        "dim": module.dim(),
        "left_action": module.left_entries().iter().map(|(i, j, k, c)| json!([i, j, k, q(c)])).collect::<Vec<_>>(),
        "right_action": module.right_entries().iter().map(|(j, i, k, c)| json!([j, i, k, q(c)])).collect::<Vec<_>>(),
    });
    if let Some(d) = module.degrees() {
        doc["degrees"] = json!(d);
    }
    doc
}

pub fn bimodule_from_json(value: &Value, algebra: Arc<Algebra>) -> Result<Bimodule> {
    let root = Node { value, path: "$" };
    let map = root.object(&[
        "name",
        "algebra",
        "algebra_dim",
        "dim",
        "left_action",
        "right_action",
        "degrees",
    ])?;
    let a = algebra.dim();
    if let Some(ad) = with_optional(root, map, "algebra_dim", |n| n.usize())? {
        if ad != a {
            return Err(Error::schema(
                "$.algebra_dim",
                format!("module is over a {ad}-dimensional algebra, given one has dimension {a}"),
            ));
        }
    }
    let dim = with_child(root, map, "dim", |n| n.usize())?;
    let left = with_child(root, map, "left_action", |n| {
        each(n, |e| {
            let (idx, c) = indexed_entry(e, 3)?;
            check_range(e.path, "action", &idx, &[a, dim, dim])?;
            Ok((idx[0], idx[1], idx[2], c))
        })
    })?;
    let right = with_child(root, map, "right_action", |n| {
        each(n, |e| {
            let (idx, c) = indexed_entry(e, 3)?;
            check_range(e.path, "action", &idx, &[dim, a, dim])?;
            Ok((idx[0], idx[1], idx[2], c))
        })
    })?;
    let degrees = with_optional(root, map, "degrees", |n| degrees_of(n, dim))?;
    let module = if is_regular(&algebra, dim, &left, &right) {
        // The regular module of a truncated model fails the axioms exactly
        // when the algebra does; accept it like `Bimodule::canonical`.
        Bimodule::canonical(algebra)?
    } else {
        Bimodule::new(algebra, dim, left, right)?
    };
    match degrees {
        Some(d) => module.with_degrees(d),
        None => Ok(module),
    }
}

fn is_regular(
    alg: &Algebra,
    dim: usize,
    left: &[(usize, usize, usize, Rational)],
    right: &[(usize, usize, usize, Rational)],
) -> bool {
    if dim != alg.dim() {
        return false;
    }
    let mut products = alg.products();
    let mut l = left.to_vec();
    // right entries are (j, i, k): m_j e_i, which is the product e_j e_i
    let mut r = right.to_vec();
    products.sort();
    l.sort();
    r.sort();
    l == products && r == products
}

pub fn bimodule_from_str(text: &str, algebra: Arc<Algebra>) -> Result<Bimodule> {
    bimodule_from_json(&parse(text)?, algebra)
}

pub fn op_to_json(op: &LinearOp) -> Value {
    json!({
        "rows": op.rows(),
        "cols": op.cols(),
        "domain": op.domain().as_str(),
        "codomain": op.codomain().as_str(),
        "matrix": (0..op.rows()).map(|r| op.row(r).iter().map(q).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn op_from_json(value: &Value) -> Result<LinearOp> {
    let root = Node { value, path: "$" };
    let map = root.object(&["name", "rows", "cols", "domain", "codomain", "matrix"])?;
    let role = |n: Node<'_>| -> Result<Role> {
        let s = n.str()?;
        Role::parse(s).ok_or_else(|| n.err(format!("unknown role `{s}`")))
    };
    let domain = with_optional(root, map, "domain", role)?.unwrap_or(Role::Total);
    let codomain = with_optional(root, map, "codomain", role)?.unwrap_or(Role::Total);
    let matrix = with_child(root, map, "matrix", |n| each(n, |row| each(row, |c| c.rational())))?;
    let rows = with_optional(root, map, "rows", |n| n.usize())?.unwrap_or(matrix.len());
    let cols = with_optional(root, map, "cols", |n| n.usize())?.unwrap_or_else(|| matrix.first().map_or(0, Vec::len));
    if matrix.len() != rows {
        return Err(Error::schema(
            "$.matrix",
            format!("expected {rows} rows, found {}", matrix.len()),
        ));
    }
    if let Some(r) = matrix.iter().position(|row| row.len() != cols) {
        return Err(Error::schema(
            format!("$.matrix[{r}]"),
            format!("expected {cols} columns"),
        ));
    }
    let mut op = LinearOp::zero(rows, cols, domain, codomain);
    for (r, row) in matrix.into_iter().enumerate() {
        for (c, v) in row.into_iter().enumerate() {
            op.set(r, c, v);
        }
    }
    Ok(op)
}

pub fn op_from_str(text: &str) -> Result<LinearOp> {
    op_from_json(&parse(text)?)
}

pub fn cochain_to_json(c: &Cochain) -> Value {
    let entries: Vec<Value> = c
        .nonzero_entries()
        .map(|(idx, v)| {
            let mut e: Vec<Value> = idx.into_iter().map(Value::from).collect();
            e.push(q(v));
            Value::Array(e)
        })
        .collect();
    json!({ "dim": c.dim(), "arity": c.arity(), "entries": entries })
}

fn cochain_at(node: Node<'_>) -> Result<Cochain> {
    let map = node.object(&["dim", "arity", "entries"])?;
    let dim = with_child(node, map, "dim", |n| n.usize())?;
    let arity = with_child(node, map, "arity", |n| n.usize())?;
    if arity == 0 {
        return Err(Error::schema(
            format!("{}.arity", node.path),
            "arity must be at least 1",
        ));
    }
    let entries = with_child(node, map, "entries", |n| {
        each(n, |e| {
            let (idx, c) = indexed_entry(e, arity + 1)?;
            check_range(e.path, "basis", &idx, &vec![dim; arity + 1])?;
            Ok((idx, c))
        })
    })?;
    Cochain::from_entries(
        dim,
        arity,
        entries.iter().map(|(idx, c)| (idx[0], &idx[1..], c.clone())),
    )
}

pub fn cochain_from_json(value: &Value) -> Result<Cochain> {
    cochain_at(Node { value, path: "$" })
}

pub fn cochain_from_str(text: &str) -> Result<Cochain> {
    cochain_from_json(&parse(text)?)
}

pub fn proto_to_json(ps: &ProtoStructure) -> Value {
    let s = ps.split();
    json!({
        "split": { "dim1": s.dim1(), "dim2": s.dim2() },
        "phi1": cochain_to_json(&ps.phi1),
        "mu1": cochain_to_json(&ps.mu1),
        "mu2": cochain_to_json(&ps.mu2),
        "phi2": cochain_to_json(&ps.phi2),
    })
}

pub fn proto_from_json(value: &Value) -> Result<ProtoStructure> {
    let root = Node { value, path: "$" };
    let map = root.object(&["split", "phi1", "mu1", "mu2", "phi2"])?;
    let split = with_child(root, map, "split", |n| {
        let m = n.object(&["dim1", "dim2"])?;
        Ok(SplitContext::new(
            with_child(n, m, "dim1", |d| d.usize())?,
            with_child(n, m, "dim2", |d| d.usize())?,
        ))
    })?;
    let part = |key| with_child(root, map, key, cochain_at);
    ProtoStructure::new(split, part("phi1")?, part("mu1")?, part("mu2")?, part("phi2")?)
}

/// Structure constants of an algebra document reinterpreted as a split
/// structure, for the verbs that accept either form.
pub fn proto_from_algebra(alg: &Algebra, split: Option<usize>) -> Result<ProtoStructure> {
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
    crate::bigraded::decompose_structure(&split, &alg.structure_cochain())
}

pub fn bound_to_json(b: &DegreeBound) -> Value {
    json!({ "max_each": b.max_each, "max_total": b.max_total })
}

pub fn verdict_to_json(v: &OperatorVerdict) -> Value {
    json!({
        "identity": v.identity,
        "holds": v.holds,
        "witness": v.witness,
        "restricted_to": v.restricted_to.as_ref().map(bound_to_json),
        "checked_inputs": v.checked_inputs,
        "residual": cochain_to_json(&v.residual),
    })
}

pub fn outcome_to_json(o: &VerifyOutcome) -> Value {
    let checks: Vec<Value> = o
        .checks
        .iter()
        .map(|c| {
            let mut v = json!({ "name": c.name, "holds": c.holds });
            if let Some(verdict) = &c.verdict {
                v["verdict"] = verdict_to_json(verdict);
            }
            v
        })
        .collect();
    let info: Map<String, Value> = o
        .info
        .iter()
        .map(|(k, v)| (k.clone(), Value::from(v.as_str())))
        .collect();
    json!({
        "identity": o.identity.as_str(),
        "holds": o.holds,
        "checks": checks,
        "info": info,
    })
}

pub fn bidegree_to_json(b: &Bidegree) -> Value {
    json!([b.k, b.l])
}

pub fn bidegree_result_to_json(r: &BidegreeResult) -> Value {
    match r {
        BidegreeResult::Zero => json!({ "kind": "zero" }),
        BidegreeResult::Homogeneous(b) => json!({ "kind": "homogeneous", "bidegree": bidegree_to_json(b) }),
        BidegreeResult::Inhomogeneous {
            first,
            witness,
            witness_bidegree,
        } => json!({
            "kind": "inhomogeneous",
            "first": bidegree_to_json(first),
            "witness": witness,
            "witness_bidegree": bidegree_to_json(witness_bidegree),
        }),
    }
}

pub fn associativity_to_json(r: &AssociativityReport) -> Value {
    json!({
        "holds": r.holds,
        "witness": r.witness.as_ref().map(|w| json!({
            "triple": w.triple,
            "left": w.left.iter().map(q).collect::<Vec<_>>(),
            "right": w.right.iter().map(q).collect::<Vec<_>>(),
        })),
    })
}

pub fn twist_to_json(r: &TwistReport) -> Value {
    json!({
        "h": op_to_json(&r.h),
        "result": proto_to_json(r.result()),
        "class": r.class().as_str(),
        "input_class": crate::bigraded::classify(&r.input).as_str(),
        "routes_agree": r.agree,
        "curvature": cochain_to_json(&r.curvature),
    })
}

pub fn conditions_to_json(r: &ProtoConditionsReport) -> Value {
    let conditions: Vec<Value> = r
        .conditions
        .iter()
        .map(|c| json!({ "name": c.name, "holds": c.holds, "residual": cochain_to_json(&c.residual) }))
        .collect();
    json!({
        "conditions": conditions,
        "all_hold": r.all_hold(),
        "theta_associative": r.theta_associative,
    })
}

/// Wraps a report body with the schema version, the command kind and the
/// hashes of its inputs.
pub fn report(kind: &str, inputs: &[(String, String)], body: Value) -> Value {
    let inputs: Vec<Value> = inputs
        .iter()
        .map(|(path, sha)| json!({ "path": path, "sha256": sha }))
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "inputs": inputs,
        "report": body,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::rational::int;

    #[test]
    fn algebra_round_trip() {
        let alg = catalog::double(&catalog::truncated_poly(3), &int(2), &rational::frac(1, 3));
        let back = algebra_from_json(&algebra_to_json(&alg)).unwrap();
        assert_eq!(back, alg);
        assert_eq!(back.split(), alg.split());
        assert_eq!(back.degrees(), alg.degrees());
        assert_eq!(back.basis_labels(), alg.basis_labels());
    }

    #[test]
    fn cochain_and_proto_round_trip() {
        let alg = catalog::double(&catalog::matrix_units(), &int(1), &int(-2));
        let ps = proto_from_algebra(&alg, None).unwrap();
        let back = proto_from_json(&proto_to_json(&ps)).unwrap();
        assert_eq!(back.parts(), ps.parts());
    }

    #[test]
    fn op_and_module_round_trip() {
        let a = Arc::new(catalog::matrix_units());
        let m = crate::algebra::dual_bimodule(a.clone(), Default::default()).unwrap();
        let back = bimodule_from_json(&bimodule_to_json(&m, "dual"), a).unwrap();
        assert_eq!(back.left_entries(), m.left_entries());
        assert_eq!(back.right_entries(), m.right_entries());
        let op = catalog::integral(4, Role::Module, Role::Algebra);
        assert_eq!(op_from_json(&op_to_json(&op)).unwrap(), op);
    }

    #[test]
    fn schema_errors_name_the_path() {
        let err = algebra_from_str(r#"{"dim": 2, "products": [[0, 0, 5, "1"]]}"#).unwrap_err();
        assert_eq!(
            err,
            Error::schema("$.products[0][2]", "basis index 5 out of range (dimension 2)")
        );
        let err = algebra_from_str(r#"{"dim": 1, "products": [], "colour": 1}"#).unwrap_err();
        assert_eq!(err, Error::schema("$.colour", "unexpected key"));
        let err = op_from_str(r#"{"matrix": [["1", "x"]]}"#).unwrap_err();
        assert!(matches!(err, Error::Schema { ref path, .. } if path == "$.matrix[0][1]"));
        let err = algebra_from_str(r#"{"products": []}"#).unwrap_err();
        assert_eq!(err, Error::schema("$.dim", "missing required key"));
    }
}
