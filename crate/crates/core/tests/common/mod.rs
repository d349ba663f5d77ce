#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twilled::algebra::{check_associativity, Algebra, LinearOp, Role};
use twilled::bigraded::{decompose_structure, ProtoStructure, SplitContext};
use twilled::catalog;
use twilled::rational::{frac, int, one, zero};
use twilled::twisting::twist_series;
use twilled::{Cochain, Rational};

pub const DEFAULT_SEED: u64 = 0x7111_1ed5;

/// Seed for every randomized suite; `TWILLED_SEED` overrides the default.
pub fn seed() -> u64 {
    std::env::var("TWILLED_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// Independent stream per suite so adding draws to one leaves the others alone.
pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed());
    r.set_stream(stream);
    r
}

/// Mostly small integers, occasionally halves.
pub fn small_rational(rng: &mut impl Rng) -> Rational {
    let n = rng.random_range(-3i64..=3);
    if rng.random_bool(0.2) {
        frac(n, 2)
    } else {
        int(n)
    }
}

pub fn random_cochain(rng: &mut impl Rng, dim: usize, arity: usize, density: f64) -> Cochain {
    Cochain::from_fn(dim, arity, |_, _| {
        if rng.random_bool(density) {
            small_rational(rng)
        } else {
            zero()
        }
    })
    .unwrap()
}

fn unit(d: usize, i: usize) -> Vec<Rational> {
    (0..d).map(|j| if i == j { one() } else { zero() }).collect()
}

/// `f ∘_i g` by evaluating `f(x_1, …, g(x_i, …), …)` on basis vectors.
pub fn oracle_comp(f: &Cochain, g: &Cochain, i: usize) -> Cochain {
    let d = f.dim();
    let (n, m) = (f.arity(), g.arity());
    Cochain::from_fn(d, n + m - 1, |out, ins| {
        let inner = g.apply_basis(&ins[i - 1..i - 1 + m]);
        let mut args: Vec<Vec<Rational>> = ins[..i - 1].iter().map(|&j| unit(d, j)).collect();
        args.push(inner);
        args.extend(ins[i - 1 + m..].iter().map(|&j| unit(d, j)));
        let refs: Vec<&[Rational]> = args.iter().map(Vec::as_slice).collect();
        f.apply(&refs)[out].clone()
    })
    .unwrap()
}

fn sign(n: usize) -> Rational {
    if n.is_multiple_of(2) {
        one()
    } else {
        -one()
    }
}

/// `{f, g}` built from [`oracle_comp`] alone.
pub fn oracle_bracket(f: &Cochain, g: &Cochain) -> Cochain {
    let bar = |a: &Cochain, b: &Cochain| {
        let mut acc = Cochain::zero(a.dim(), a.arity() + b.arity() - 1).unwrap();
        for i in 1..=a.arity() {
            acc += &oracle_comp(a, b, i).scale(&sign((i - 1) * (b.arity() - 1)));
        }
        acc
    };
    bar(f, g) - bar(g, f).scale(&sign((f.arity() - 1) * (g.arity() - 1)))
}

pub fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().cloned().chain(unit(n, i)).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col] != zero())?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x = &*x / &p;
        }
        for r in 0..n {
            if r != col && a[r][col] != zero() {
                let factor = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &factor * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn random_invertible(rng: &mut impl Rng, n: usize) -> (Vec<Vec<Rational>>, Vec<Vec<Rational>>) {
    loop {
        let p: Vec<Vec<Rational>> = (0..n)
            .map(|_| (0..n).map(|_| int(rng.random_range(-2i64..=2))).collect())
            .collect();
        if let Some(inv) = invert(&p) {
            return (p, inv);
        }
    }
}

/// `μ'(x, y) = P⁻¹ μ(Px, Py)`.
pub fn conjugate(mu: &Cochain, p: &[Vec<Rational>], p_inv: &[Vec<Rational>]) -> Cochain {
    let d = mu.dim();
    let cols: Vec<Vec<Rational>> = (0..d).map(|c| (0..d).map(|r| p[r][c].clone()).collect()).collect();
    Cochain::from_fn(d, 2, |out, ins| {
        let v = mu.apply(&[&cols[ins[0]], &cols[ins[1]]]);
        (0..d).map(|k| &p_inv[out][k] * &v[k]).sum()
    })
    .unwrap()
}

fn two_dim_bases() -> Vec<Algebra> {
    vec![
        catalog::matrix_units(),
        catalog::pointwise(2),
        catalog::truncated_poly(2),
    ]
}

fn four_dim_algebras(rng: &mut impl Rng) -> Algebra {
    match rng.random_range(0..4) {
        0 => catalog::full_matrices(),
        1 => catalog::truncated_poly(4),
        2 => catalog::pointwise(4),
        _ => {
            let bases = two_dim_bases();
            let b = &bases[rng.random_range(0..bases.len())];
            catalog::double(b, &small_rational(rng), &small_rational(rng))
        }
    }
}

/// An associative structure on `ℚ⁴` split as `(2, 2)`: a known algebra in
/// random coordinates, so generically all four parts are nonzero.
pub fn random_associative_proto(rng: &mut impl Rng) -> ProtoStructure {
    let alg = four_dim_algebras(rng);
    let (p, p_inv) = random_invertible(rng, 4);
    let theta = conjugate(&alg.structure_cochain(), &p, &p_inv);
    decompose_structure(&SplitContext::new(2, 2), &theta).unwrap()
}

/// Arbitrary bilinear product on `ℚ⁴`, split `(2, 2)`.
pub fn random_proto(rng: &mut impl Rng) -> ProtoStructure {
    let theta = random_cochain(rng, 4, 2, 0.4);
    decompose_structure(&SplitContext::new(2, 2), &theta).unwrap()
}

pub fn random_h(rng: &mut impl Rng, domain: Role, codomain: Role) -> LinearOp {
    LinearOp::from_fn(2, 2, domain, codomain, |_, _| small_rational(rng))
}

/// Twilled structure at `(2, 2)`: `A ⋈_q A` for a 2-dim base, with each
/// summand in its own random coordinates.
pub fn random_twilled(rng: &mut impl Rng) -> ProtoStructure {
    let bases = two_dim_bases();
    let b = &bases[rng.random_range(0..bases.len())];
    let q = loop {
        let q = small_rational(rng);
        if q != zero() {
            break q;
        }
    };
    let alg = catalog::double(b, &q, &zero());
    let (p1, i1) = random_invertible(rng, 2);
    let (p2, i2) = random_invertible(rng, 2);
    let block = |a: &[Vec<Rational>], b: &[Vec<Rational>]| -> Vec<Vec<Rational>> {
        (0..4)
            .map(|r| {
                (0..4)
                    .map(|c| match (r < 2, c < 2) {
                        (true, true) => a[r][c].clone(),
                        (false, false) => b[r - 2][c - 2].clone(),
                        _ => zero(),
                    })
                    .collect()
            })
            .collect()
    };
    let theta = conjugate(&alg.structure_cochain(), &block(&p1, &p2), &block(&i1, &i2));
    decompose_structure(&SplitContext::new(2, 2), &theta).unwrap()
}

/// Associative structure with `φ2 = 0` and `{μ̂1, μ̂1} ≠ 0`: a twilled
/// structure twisted by a random `H: A1 → A2`.
pub fn random_quasi_twilled(rng: &mut impl Rng) -> ProtoStructure {
    loop {
        let ps = random_twilled(rng);
        let h = random_h(rng, Role::A1, Role::A2);
        let q = twist_series(&ps, &h).unwrap();
        if !twilled::cochain::g_bracket(&q.mu1, &q.mu1).unwrap().is_zero() {
            assert!(q.phi2.is_zero());
            return q;
        }
    }
}

pub fn is_associative(theta: &Cochain) -> bool {
    check_associativity(&Algebra::from_cochain("θ", theta).unwrap()).holds
}

/// Random cochain `A2^{⊗n} → A1` lifted to the total space.
pub fn random_a2_to_a1(rng: &mut impl Rng, split: &SplitContext, arity: usize) -> Cochain {
    let n1 = split.dim1();
    Cochain::from_fn(split.total(), arity, |out, ins| {
        if out < n1 && ins.iter().all(|&i| i >= n1) {
            small_rational(rng)
        } else {
            zero()
        }
    })
    .unwrap()
}
