//! Multilinear maps `V^{⊗n} → V` on a finite-dimensional space and the
//! Gerstenhaber calculus on them.
//!
//! A [`Cochain`] of arity `n` over a `d`-dimensional space is a dense array of
//! `d^{n+1}` rationals indexed `(out, in_1, …, in_n)`, row-major with the
//! output index most significant:
//!
//! ```text
//! f(e_{i1}, …, e_{in}) = Σ_out coeff[out, i1, …, in] · e_out
//! ```
//!
//! Sign conventions:
//!
//! * `f ∘̄ g = Σ_{i=1}^{|f|} (-1)^{(i-1)(|g|-1)} f ∘_i g`
//! * `{f, g} = f ∘̄ g − (-1)^{(|f|-1)(|g|-1)} g ∘̄ f`
//! * `[f, g]_S = (-1)^{|f|-1} {{S, f}, g}`
//! * `[f, g, h]_φ = (-1)^{|g|-1} {{{φ, f}, g}, h}`

use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, PartialEq, Eq)]
pub struct Cochain {
    dim: usize,
    arity: usize,
    coeffs: Vec<Rational>,
}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (idx, c) in self.nonzero_entries() {
            m.entry(&idx, &rational::format(c));
        }
        m.finish()?;
        write!(f, " (dim {}, arity {})", self.dim, self.arity)
    }
}

impl Cochain {
    pub fn zero(dim: usize, arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::ZeroArity);
        }
        let len = dim.pow(arity as u32 + 1);
        Ok(Cochain {
            dim,
            arity,
            coeffs: vec![Rational::zero(); len],
        })
    }

    /// Fills every coefficient from `f(out, inputs)`.
    pub fn from_fn(dim: usize, arity: usize, mut f: impl FnMut(usize, &[usize]) -> Rational) -> Result<Self> {
        let mut c = Cochain::zero(dim, arity)?;
        let mut idx = vec![0usize; arity + 1];
        for flat in 0..c.coeffs.len() {
            c.unflatten_into(flat, &mut idx);
            c.coeffs[flat] = f(idx[0], &idx[1..]);
        }
        Ok(c)
    }

    /// Builds a cochain from `(out, inputs, value)` triples; repeated indices add up.
    pub fn from_entries<'a, I>(dim: usize, arity: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, &'a [usize], Rational)>,
    {
        let mut c = Cochain::zero(dim, arity)?;
        for (out, ins, v) in entries {
            if ins.len() != arity {
                return Err(Error::DimensionMismatch(format!(
                    "entry has {} inputs, cochain arity is {arity}",
                    ins.len()
                )));
            }
            let flat = c.checked_flat(out, ins)?;
            c.coeffs[flat] += v;
        }
        Ok(c)
    }

    pub fn identity(dim: usize) -> Self {
        Cochain::from_fn(dim, 1, |out, ins| {
            if out == ins[0] {
                rational::one()
            } else {
                rational::zero()
            }
        })
        .expect("arity 1")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Graded-Lie degree `|f| - 1`.
    pub fn degree(&self) -> usize {
        self.arity - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn get(&self, out: usize, ins: &[usize]) -> &Rational {
        &self.coeffs[self.flat(out, ins)]
    }

    pub fn set(&mut self, out: usize, ins: &[usize], value: Rational) {
        let flat = self.flat(out, ins);
        self.coeffs[flat] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn same_shape(&self, other: &Cochain) -> bool {
        self.dim == other.dim && self.arity == other.arity
    }

    /// `(out, in_1, …, in_n)` and value of every nonzero coefficient, in storage order.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (Vec<usize>, &Rational)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(flat, c)| (self.unflatten(flat), c))
    }

    pub fn first_nonzero(&self) -> Option<Vec<usize>> {
        self.nonzero_entries().next().map(|(idx, _)| idx)
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn scale(&self, s: &Rational) -> Cochain {
        Cochain {
            dim: self.dim,
            arity: self.arity,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Multilinear evaluation on coordinate vectors.
    pub fn apply(&self, args: &[&[Rational]]) -> Vec<Rational> {
        assert_eq!(args.len(), self.arity, "wrong number of arguments");
        for a in args {
            assert_eq!(a.len(), self.dim, "argument dimension");
        }
        let mut out = vec![Rational::zero(); self.dim];
        let mut idx = vec![0usize; self.arity + 1];
        for (flat, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            self.unflatten_into(flat, &mut idx);
            let mut term = c.clone();
            for (slot, &i) in idx[1..].iter().enumerate() {
                let x = &args[slot][i];
                if x.is_zero() {
                    term.set_zero();
                    break;
                }
                term *= x;
            }
            if !term.is_zero() {
                out[idx[0]] += term;
            }
        }
        out
    }

    /// Value on basis vectors: the column `coeff[·, ins]`.
    pub fn apply_basis(&self, ins: &[usize]) -> Vec<Rational> {
        (0..self.dim).map(|out| self.get(out, ins).clone()).collect()
    }

    /// Re-expresses the cochain in a permuted basis: new basis vector `j` is old
    /// basis vector `perm[j]`.
    pub fn permute_basis(&self, perm: &[usize]) -> Cochain {
        assert_eq!(perm.len(), self.dim);
        let mut out = Cochain::zero(self.dim, self.arity).expect("arity >= 1");
        let mut old = vec![0usize; self.arity + 1];
        let mut idx = vec![0usize; self.arity + 1];
        for flat in 0..out.coeffs.len() {
            out.unflatten_into(flat, &mut idx);
            for (o, &n) in old.iter_mut().zip(&idx) {
                *o = perm[n];
            }
            out.coeffs[flat] = self.get(old[0], &old[1..]).clone();
        }
        out
    }

    pub(crate) fn flat(&self, out: usize, ins: &[usize]) -> usize {
        debug_assert_eq!(ins.len(), self.arity);
        let mut flat = out;
        for &i in ins {
            flat = flat * self.dim + i;
        }
        flat
    }

    fn checked_flat(&self, out: usize, ins: &[usize]) -> Result<usize> {
        for &i in std::iter::once(&out).chain(ins) {
            if i >= self.dim {
                return Err(Error::DimensionMismatch(format!(
                    "basis index {i} out of range for dimension {}",
                    self.dim
                )));
            }
        }
        Ok(self.flat(out, ins))
    }

    pub(crate) fn unflatten(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.arity + 1];
        self.unflatten_into(flat, &mut idx);
        idx
    }

    fn unflatten_into(&self, mut flat: usize, idx: &mut [usize]) {
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.dim;
            flat /= self.dim;
        }
    }

    fn assert_same_shape(&self, other: &Cochain) {
        assert!(
            self.same_shape(other),
            "cochain shape mismatch: (dim {}, arity {}) vs (dim {}, arity {})",
            self.dim,
            self.arity,
            other.dim,
            other.arity
        );
    }
}

impl Add<&Cochain> for &Cochain {
    type Output = Cochain;

    /// Panics if the shapes differ.
    fn add(self, rhs: &Cochain) -> Cochain {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Cochain {
    type Output = Cochain;

    fn add(mut self, rhs: Cochain) -> Cochain {
        self += &rhs;
        self
    }
}

impl Sub<&Cochain> for &Cochain {
    type Output = Cochain;

    fn sub(self, rhs: &Cochain) -> Cochain {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Cochain {
    type Output = Cochain;

    fn sub(mut self, rhs: Cochain) -> Cochain {
        self -= &rhs;
        self
    }
}

impl AddAssign<&Cochain> for Cochain {
    fn add_assign(&mut self, rhs: &Cochain) {
        self.assert_same_shape(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            if !b.is_zero() {
                *a += b;
            }
        }
    }
}

impl SubAssign<&Cochain> for Cochain {
    fn sub_assign(&mut self, rhs: &Cochain) {
        self.assert_same_shape(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            if !b.is_zero() {
                *a -= b;
            }
        }
    }
}

impl Neg for &Cochain {
    type Output = Cochain;

    fn neg(self) -> Cochain {
        Cochain {
            dim: self.dim,
            arity: self.arity,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for Cochain {
    type Output = Cochain;

    fn neg(self) -> Cochain {
        -&self
    }
}

fn check_same_dim(f: &Cochain, g: &Cochain) -> Result<()> {
    if f.dim != g.dim {
        return Err(Error::DimensionMismatch(format!(
            "cochains over spaces of dimension {} and {}",
            f.dim, g.dim
        )));
    }
    Ok(())
}

/// `f ∘_i g`: insert `g` into the `i`-th slot (1-based) of `f`.
pub fn comp_i(f: &Cochain, g: &Cochain, i: usize) -> Result<Cochain> {
    check_same_dim(f, g)?;
    if i == 0 || i > f.arity {
        return Err(Error::IndexOutOfRange { index: i, max: f.arity });
    }
    let d = f.dim;
    let (n, m) = (f.arity, g.arity);
    let mut out = Cochain::zero(d, n + m - 1)?;
    if d == 0 {
        return Ok(out);
    }

    // g's nonzero entries bucketed by output index, inputs packed base-d.
    let g_in_span = d.pow(m as u32);
    let mut g_by_out: Vec<Vec<(usize, &Rational)>> = vec![Vec::new(); d];
    for (flat, c) in g.coeffs.iter().enumerate() {
        if !c.is_zero() {
            g_by_out[flat / g_in_span].push((flat % g_in_span, c));
        }
    }

    // Split f's flat index as (out·d^{i-1} + pre) | slot | post.
    let post_span = d.pow((n - i) as u32);
    let head_stride = g_in_span * post_span;
    for (flat, c) in f.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let post = flat % post_span;
        let rest = flat / post_span;
        let slot = rest % d;
        let head = rest / d;
        for &(g_in, gc) in &g_by_out[slot] {
            let target = head * head_stride + g_in * post_span + post;
            out.coeffs[target] += c * gc;
        }
    }
    Ok(out)
}

/// `f ∘̄ g = Σ_i (-1)^{(i-1)(|g|-1)} f ∘_i g`.
pub fn bar_comp(f: &Cochain, g: &Cochain) -> Result<Cochain> {
    check_same_dim(f, g)?;
    let mut acc = Cochain::zero(f.dim, f.arity + g.arity - 1)?;
    for i in 1..=f.arity {
        let term = comp_i(f, g, i)?;
        if ((i - 1) * (g.arity - 1)).is_multiple_of(2) {
            acc += &term;
        } else {
            acc -= &term;
        }
    }
    Ok(acc)
}

/// Gerstenhaber bracket `{f, g}`.
pub fn g_bracket(f: &Cochain, g: &Cochain) -> Result<Cochain> {
    let fg = bar_comp(f, g)?;
    let gf = bar_comp(g, f)?;
    if ((f.arity - 1) * (g.arity - 1)).is_multiple_of(2) {
        Ok(fg - gf)
    } else {
        Ok(fg + gf)
    }
}

/// Hochschild differential `d_S f = {S, f}`. With `check_structure`, first
/// verifies `{S, S} = 0` and reports a precondition failure otherwise.
pub fn hochschild_d(s: &Cochain, f: &Cochain, check_structure: bool) -> Result<Cochain> {
    if check_structure && !g_bracket(s, s)?.is_zero() {
        return Err(Error::Precondition(
            "{S,S} != 0: S is not an associative structure".into(),
        ));
    }
    g_bracket(s, f)
}

/// Derived bracket `[f, g]_S = (-1)^{|f|-1} {{S, f}, g}`.
pub fn derived_bracket(s: &Cochain, f: &Cochain, g: &Cochain) -> Result<Cochain> {
    let inner = g_bracket(s, f)?;
    let outer = g_bracket(&inner, g)?;
    Ok(if f.degree().is_multiple_of(2) { outer } else { -outer })
}

/// Ternary bracket `[f, g, h]_φ = (-1)^{|g|-1} {{{φ, f}, g}, h}`.
pub fn tribracket(phi: &Cochain, f: &Cochain, g: &Cochain, h: &Cochain) -> Result<Cochain> {
    let a = g_bracket(phi, f)?;
    let b = g_bracket(&a, g)?;
    let c = g_bracket(&b, h)?;
    Ok(if g.degree().is_multiple_of(2) { c } else { -c })
}

/// Cup product `f ∨_S g = S(f ⊗ g)`, arity `|f| + |g|`.
pub fn cup_product(s: &Cochain, f: &Cochain, g: &Cochain) -> Result<Cochain> {
    if s.arity != 2 {
        return Err(Error::Precondition(format!(
            "cup product needs an arity-2 structure, got arity {}",
            s.arity
        )));
    }
    let left = comp_i(s, f, 1)?;
    comp_i(&left, g, f.arity + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn scalar_mul() -> Cochain {
        Cochain::from_entries(1, 2, [(0, &[0, 0][..], int(1))]).unwrap()
    }

    /// Span of E12 (index 0) and E11 (index 1) inside 2×2 matrices.
    fn matrix_units() -> Cochain {
        Cochain::from_entries(2, 2, [(1, &[1, 1][..], int(1)), (0, &[1, 0][..], int(1))]).unwrap()
    }

    #[test]
    fn flat_layout_is_out_major() {
        let mut c = Cochain::zero(3, 2).unwrap();
        c.set(2, &[1, 0], int(5));
        assert_eq!(c.coeffs()[2 * 9 + 3], int(5));
        assert_eq!(c.first_nonzero(), Some(vec![2, 1, 0]));
    }

    #[test]
    fn arity_zero_rejected() {
        assert_eq!(Cochain::zero(2, 0).unwrap_err(), Error::ZeroArity);
    }

    #[test]
    fn comp_with_identity() {
        let g = matrix_units();
        let id = Cochain::identity(2);
        assert_eq!(comp_i(&id, &g, 1).unwrap(), g);
        assert_eq!(comp_i(&g, &id, 1).unwrap(), g);
        assert_eq!(comp_i(&g, &id, 2).unwrap(), g);
    }

    #[test]
    fn comp_index_range() {
        let g = matrix_units();
        assert!(matches!(
            comp_i(&g, &g, 3),
            Err(Error::IndexOutOfRange { index: 3, max: 2 })
        ));
        assert!(comp_i(&g, &g, 0).is_err());
        assert!(comp_i(&g, &Cochain::identity(3), 1).is_err());
    }

    #[test]
    fn comp_scalar_algebra() {
        let mu = scalar_mul();
        let c = comp_i(&mu, &mu, 1).unwrap();
        assert_eq!(c.arity(), 3);
        assert_eq!(c.get(0, &[0, 0, 0]), &int(1));
    }

    #[test]
    fn comp_matrix_units_associative() {
        // (ab)c and a(bc) agree because the algebra is associative.
        let mu = matrix_units();
        let c1 = comp_i(&mu, &mu, 1).unwrap();
        let c2 = comp_i(&mu, &mu, 2).unwrap();
        assert_eq!(c1, c2);
        // Brute force: (e_a e_b) e_c via apply.
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let ab = mu.apply_basis(&[a, b]);
                    let mut ec = vec![int(0), int(0)];
                    ec[c] = int(1);
                    let abc = mu.apply(&[&ab, &ec]);
                    assert_eq!(c1.apply_basis(&[a, b, c]), abc);
                }
            }
        }
    }

    #[test]
    fn comp_matches_brute_force_on_mixed_arities() {
        // f arity 2, g arity 3 over d=2, checked against direct evaluation.
        let f = Cochain::from_fn(2, 2, |o, i| int((o + 2 * i[0] + 3 * i[1]) as i64 - 2)).unwrap();
        let g = Cochain::from_fn(2, 3, |o, i| frac((o * 5 + i[0] + i[1] * i[2]) as i64 - 3, 2)).unwrap();
        for slot in 1..=2 {
            let c = comp_i(&f, &g, slot).unwrap();
            assert_eq!(c.arity(), 4);
            for flat in 0..16 {
                let ins: Vec<usize> = (0..4).map(|k| (flat >> (3 - k)) & 1).collect();
                let inner = g.apply_basis(&ins[slot - 1..slot + 2]);
                let mut args: Vec<Vec<Rational>> = Vec::new();
                let basis = |i: usize| {
                    let mut v = vec![int(0), int(0)];
                    v[i] = int(1);
                    v
                };
                if slot == 1 {
                    args.push(inner);
                    args.push(basis(ins[3]));
                } else {
                    args.push(basis(ins[0]));
                    args.push(inner);
                }
                let refs: Vec<&[Rational]> = args.iter().map(|v| v.as_slice()).collect();
                assert_eq!(c.apply_basis(&ins), f.apply(&refs), "slot {slot} ins {ins:?}");
            }
        }
    }

    #[test]
    fn bar_comp_examples() {
        let mu = scalar_mul();
        let id = Cochain::identity(1);
        assert_eq!(bar_comp(&mu, &id).unwrap(), mu.scale(&int(2)));
        assert_eq!(bar_comp(&id, &mu).unwrap(), mu);
    }

    #[test]
    fn bracket_examples() {
        let mu = scalar_mul();
        let id = Cochain::identity(1);
        // {μ, id} = 2μ − μ
        assert_eq!(g_bracket(&mu, &id).unwrap(), mu);
        let h = Cochain::from_fn(3, 1, |o, i| int((o * 3 + i[0]) as i64 - 4)).unwrap();
        assert!(g_bracket(&h, &h).unwrap().is_zero());
    }

    /// Pins the two parities the calculus depends on.
    #[test]
    fn sign_table() {
        // (i-1)(|g|-1) for |g| = 2: slot 2 flips.
        let mu = matrix_units();
        let expect = comp_i(&mu, &mu, 1).unwrap() - comp_i(&mu, &mu, 2).unwrap();
        assert_eq!(bar_comp(&mu, &mu).unwrap(), expect);
        // |g| = 3: every slot has even parity.
        let t = Cochain::from_fn(2, 3, |o, i| int((o + i[0] + 2 * i[2]) as i64)).unwrap();
        let expect = comp_i(&mu, &t, 1).unwrap() + comp_i(&mu, &t, 2).unwrap();
        assert_eq!(bar_comp(&mu, &t).unwrap(), expect);
        // (|f|-1)(|g|-1) odd for two arity-2 cochains: the bracket is symmetric.
        let nu = Cochain::from_fn(2, 2, |o, i| int((o + i[0] * i[1]) as i64)).unwrap();
        assert_eq!(g_bracket(&mu, &nu).unwrap(), g_bracket(&nu, &mu).unwrap());
    }

    #[test]
    fn structure_bracket_is_twice_associator() {
        let mu = matrix_units();
        assert!(g_bracket(&mu, &mu).unwrap().is_zero());
        // e1 e1 = e2 (0-based: e0 e0 = e1), e2 e1 = e1 (e1 e0 = e0): not associative
        let bad = Cochain::from_entries(2, 2, [(1, &[0, 0][..], int(1)), (0, &[1, 0][..], int(1))]).unwrap();
        let sq = g_bracket(&bad, &bad).unwrap();
        let assoc = comp_i(&bad, &bad, 1).unwrap() - comp_i(&bad, &bad, 2).unwrap();
        assert_eq!(sq, assoc.scale(&int(2)));
        assert!(!sq.is_zero());
    }

    #[test]
    fn hochschild_examples() {
        let mu = scalar_mul();
        let id = Cochain::identity(1);
        assert!(hochschild_d(&mu, &mu, true).unwrap().is_zero());
        assert_eq!(hochschild_d(&mu, &id, true).unwrap(), mu);
        let bad = Cochain::from_entries(2, 2, [(1, &[0, 0][..], int(1)), (0, &[1, 0][..], int(1))]).unwrap();
        assert!(matches!(
            hochschild_d(&bad, &Cochain::identity(2), true),
            Err(Error::Precondition(_))
        ));
        assert!(hochschild_d(&bad, &Cochain::identity(2), false).is_ok());
    }

    #[test]
    fn derived_and_tri_vanish_on_zero() {
        let mu = matrix_units();
        let z = Cochain::zero(2, 1).unwrap();
        let h = Cochain::from_fn(2, 1, |o, i| int((o + i[0]) as i64)).unwrap();
        assert!(derived_bracket(&mu, &z, &h).unwrap().is_zero());
        assert!(derived_bracket(&mu, &h, &z).unwrap().is_zero());
        let phi = Cochain::zero(2, 2).unwrap();
        assert!(tribracket(&phi, &h, &h, &h).unwrap().is_zero());
    }

    #[test]
    fn cup_examples() {
        let mu = scalar_mul();
        let id = Cochain::identity(1);
        assert_eq!(cup_product(&mu, &id, &id).unwrap(), mu);
        let z = Cochain::zero(1, 2).unwrap();
        assert!(cup_product(&mu, &z, &id).unwrap().is_zero());
        assert!(cup_product(&id, &id, &id).is_err());
        // Arity adds up.
        let c = cup_product(&mu, &mu, &id).unwrap();
        assert_eq!(c.arity(), 3);
    }

    #[test]
    fn apply_is_multilinear() {
        let mu = matrix_units();
        let x = vec![frac(1, 2), int(3)];
        let y = vec![int(-1), frac(2, 3)];
        // (x0 E12 + x1 E11)(y0 E12 + y1 E11) = x1 y0 E12 + x1 y1 E11
        let p = mu.apply(&[&x, &y]);
        assert_eq!(p, vec![int(-3), int(2)]);
    }

    #[test]
    fn permute_round_trip() {
        let f = Cochain::from_fn(3, 2, |o, i| int((o * 9 + i[0] * 3 + i[1]) as i64)).unwrap();
        let perm = [2, 0, 1];
        let inv = [1, 2, 0];
        assert_eq!(f.permute_basis(&perm).permute_basis(&inv), f);
        assert_eq!(f.permute_basis(&perm).get(0, &[1, 2]), f.get(2, &[0, 1]));
    }
}
