//! Linear differential operators with coordinate-polynomial coefficients,
//! kept in normal order (all derivatives to the right of all coefficient
//! functions), and the commutator machinery built on them.

use crate::coord::{CoordMonomial, CoordPolynomial};
use crate::param::{ParamError, ParamScalar};
use crate::scalar::GaussianRational;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Multi-index of partial derivatives over (t, x, y, z).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct DerivIndex(pub [u32; 4]);

impl DerivIndex {
    pub fn none() -> Self {
        Self([0; 4])
    }

    pub fn axis(k: usize) -> Self {
        let mut e = [0; 4];
        e[k] = 1;
        Self(e)
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_none(&self) -> bool {
        self.0 == [0; 4]
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut e = [0; 4];
        for k in 0..4 {
            e[k] = self.0[k] + other.0[k];
        }
        Self(e)
    }

    /// Componentwise difference; None when any component would go negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let mut e = [0; 4];
        for k in 0..4 {
            e[k] = self.0[k].checked_sub(other.0[k])?;
        }
        Some(Self(e))
    }
}

impl PartialOrd for DerivIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded lexicographic with t-major ties, so the order-minimal index
/// sorts first and d_t precedes d_x at equal order.
impl Ord for DerivIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| other.0.cmp(&self.0))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReduceError {
    #[error("operator is not a polynomial multiple of the base operator")]
    NotMultiple,
    #[error("base operator is zero or has no constant-coefficient term")]
    MalformedBase,
}

/// Normal-ordered linear differential operator: a finite sum of
/// `coefficient(x) * d^alpha` terms with distinct derivative indices.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DiffOp {
    terms: BTreeMap<DerivIndex, CoordPolynomial>,
}

impl DiffOp {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn identity() -> Self {
        Self::from_polynomial(CoordPolynomial::one())
    }

    /// Pure multiplication operator by a coordinate polynomial.
    pub fn from_polynomial(p: CoordPolynomial) -> Self {
        Self::single(p, DerivIndex::none())
    }

    /// Single derivative along one axis.
    pub fn deriv(axis: usize) -> Self {
        Self::single(CoordPolynomial::one(), DerivIndex::axis(axis))
    }

    pub fn single(coeff: CoordPolynomial, d: DerivIndex) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(d, coeff);
        }
        Self { terms }
    }

    pub fn from_terms(terms: Vec<(CoordPolynomial, DerivIndex)>) -> Self {
        let mut out: BTreeMap<DerivIndex, CoordPolynomial> = BTreeMap::new();
        for (p, d) in terms {
            let entry = out.entry(d).or_insert_with(CoordPolynomial::zero);
            *entry = entry.add(&p);
        }
        out.retain(|_, p| !p.is_zero());
        Self { terms: out }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DerivIndex, &CoordPolynomial)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, d: &DerivIndex) -> CoordPolynomial {
        self.terms.get(d).cloned().unwrap_or_else(CoordPolynomial::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Highest derivative order appearing; None for the zero operator.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|d| d.order()).max()
    }

    /// Highest coordinate degree over all coefficients.
    pub fn coefficient_degree(&self) -> Option<u32> {
        self.terms.values().filter_map(|p| p.degree()).max()
    }

    pub fn contains_unknown(&self) -> bool {
        self.terms.values().any(|p| p.contains_unknown())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.terms.clone();
        for (d, p) in &other.terms {
            let entry = out.entry(*d).or_insert_with(CoordPolynomial::zero);
            *entry = entry.add(p);
        }
        out.retain(|_, p| !p.is_zero());
        Self { terms: out }
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(d, p)| (*d, p.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &ParamScalar) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(d, p)| (*d, p.scale(s))).collect(),
        }
    }

    /// Left multiplication by a coordinate polynomial: f * (g d^a) = (fg) d^a.
    pub fn mul_polynomial_left(&self, f: &CoordPolynomial) -> Self {
        if f.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (d, p) in &self.terms {
            out = out.add(&Self::single(f.mul(p), *d));
        }
        out
    }

    /// Normal-ordered operator product via the generalized Leibniz rule:
    /// (f d^a)(g d^b) = sum over c <= a of C(a, c) f (d^c g) d^(a - c + b),
    /// with C(a, c) the componentwise product of binomial coefficients.
    pub fn compose(&self, other: &Self) -> Self {
        let mut acc: Vec<(CoordPolynomial, DerivIndex)> = Vec::new();
        for (a, f) in &self.terms {
            for (b, g) in &other.terms {
                for c in sub_indices(a) {
                    // d^c applied to g
                    let mut dg = g.clone();
                    for axis in 0..4 {
                        for _ in 0..c.0[axis] {
                            dg = dg.derivative(axis);
                            if dg.is_zero() {
                                break;
                            }
                        }
                        if dg.is_zero() {
                            break;
                        }
                    }
                    if dg.is_zero() {
                        continue;
                    }
                    let coeff = binomial_product(a, &c);
                    let poly = f.mul(&dg).scale_coeff(&coeff);
                    let d = a.checked_sub(&c).unwrap().add(b);
                    acc.push((poly, d));
                }
            }
        }
        Self::from_terms(acc)
    }

    /// [A, B] = AB - BA.
    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other).sub(&other.compose(self))
    }

    /// p-fold left-nested commutator [L, [L, ... [L, Q] ... ]].
    pub fn nested_commutator(l: &Self, q: &Self, p: u32) -> Self {
        assert!(p >= 1, "nesting depth must be at least 1");
        let mut acc = l.commutator(q);
        for _ in 1..p {
            acc = l.commutator(&acc);
        }
        acc
    }

    /// Apply the operator to a coordinate polynomial.
    pub fn apply(&self, f: &CoordPolynomial) -> CoordPolynomial {
        let mut acc = CoordPolynomial::zero();
        for (d, p) in &self.terms {
            let mut df = f.clone();
            for axis in 0..4 {
                for _ in 0..d.0[axis] {
                    df = df.derivative(axis);
                    if df.is_zero() {
                        break;
                    }
                }
            }
            if !df.is_zero() {
                acc = acc.add(&p.mul(&df));
            }
        }
        acc
    }

    /// Decide whether `self` equals `zeta(x) * base` for a coordinate
    /// polynomial zeta of degree <= max_zeta_degree, and return zeta.
    ///
    /// Strategy: pick the constant-coefficient term of `base` with the
    /// order-minimal derivative index (graded-lex tie-break), divide the
    /// matching coefficient of `self` by that scalar to get a candidate,
    /// verify the full identity, and fall back to a linear solve for
    /// zeta's coefficients when the candidate fails.
    pub fn reduce_mod(
        &self,
        base: &Self,
        max_zeta_degree: u32,
    ) -> Result<CoordPolynomial, ReduceError> {
        if base.is_zero() {
            return Err(ReduceError::MalformedBase);
        }
        // Order-minimal derivative index among constant-coefficient terms.
        let anchor = base
            .terms
            .iter()
            .find(|(_, p)| p.is_constant())
            .map(|(d, p)| (*d, p.coefficient(&CoordMonomial::one())));
        let Some((anchor_idx, anchor_scalar)) = anchor else {
            return Err(ReduceError::MalformedBase);
        };
        if self.is_zero() {
            return Ok(CoordPolynomial::zero());
        }
        let candidate = self
            .coefficient(&anchor_idx)
            .exact_div_scalar(&anchor_scalar);
        if let Ok(zeta) = candidate {
            if zeta.degree().unwrap_or(0) <= max_zeta_degree
                && self.sub(&base.mul_polynomial_left(&zeta)).is_zero()
            {
                return Ok(zeta);
            }
        }
        // Fall back: solve self = zeta * base linearly in zeta's
        // coefficients over all monomials of degree <= max_zeta_degree.
        match crate::linsys::solve_polynomial_multiple(self, base, max_zeta_degree) {
            Some(zeta) => Ok(zeta),
            None => Err(ReduceError::NotMultiple),
        }
    }
}

/// All multi-indices c with c <= a componentwise.
fn sub_indices(a: &DerivIndex) -> Vec<DerivIndex> {
    let mut out = Vec::new();
    for c0 in 0..=a.0[0] {
        for c1 in 0..=a.0[1] {
            for c2 in 0..=a.0[2] {
                for c3 in 0..=a.0[3] {
                    out.push(DerivIndex([c0, c1, c2, c3]));
                }
            }
        }
    }
    out
}

fn binomial(n: u32, k: u32) -> u64 {
    let mut acc: u64 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u64 / (j + 1) as u64;
    }
    acc
}

fn binomial_product(a: &DerivIndex, c: &DerivIndex) -> GaussianRational {
    let mut acc: u64 = 1;
    for k in 0..4 {
        acc *= binomial(a.0[k], c.0[k]);
    }
    GaussianRational::from_int(acc as i64)
}

/// Exact divisibility of every coefficient of `op` by a scalar.
pub fn exact_div_op(op: &DiffOp, s: &ParamScalar) -> Result<DiffOp, ParamError> {
    let mut terms = Vec::new();
    for (d, p) in op.terms() {
        terms.push((p.exact_div_scalar(s)?, *d));
    }
    Ok(DiffOp::from_terms(terms))
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::display::diffop_to_string(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coord::CoordPolynomial;

    fn x_poly() -> CoordPolynomial {
        CoordPolynomial::var(1)
    }

    #[test]
    fn leibniz_one_variable() {
        // d_x (x d_x) = x d_xx + d_x
        let dx = DiffOp::deriv(1);
        let x_dx = DiffOp::single(x_poly(), DerivIndex::axis(1));
        let got = dx.compose(&x_dx);
        let expect = DiffOp::from_terms(vec![
            (x_poly(), DerivIndex([0, 2, 0, 0])),
            (CoordPolynomial::one(), DerivIndex::axis(1)),
        ]);
        assert_eq!(got, expect);
    }

    #[test]
    fn no_derivative_hits_constant() {
        // (x d_x) d_x = x d_xx
        let dx = DiffOp::deriv(1);
        let x_dx = DiffOp::single(x_poly(), DerivIndex::axis(1));
        let got = x_dx.compose(&dx);
        let expect = DiffOp::single(x_poly(), DerivIndex([0, 2, 0, 0]));
        assert_eq!(got, expect);
    }

    #[test]
    fn second_order_leibniz() {
        // d_xx (x^2 .) = x^2 d_xx + 4x d_x + 2
        let dxx = DiffOp::single(CoordPolynomial::one(), DerivIndex([0, 2, 0, 0]));
        let x2 = DiffOp::from_polynomial(CoordPolynomial::monomial(CoordMonomial([0, 2, 0, 0])));
        let got = dxx.compose(&x2);
        let expect = DiffOp::from_terms(vec![
            (
                CoordPolynomial::monomial(CoordMonomial([0, 2, 0, 0])),
                DerivIndex([0, 2, 0, 0]),
            ),
            (
                CoordPolynomial::term(ParamScalar::from_int(4), CoordMonomial::var(1)),
                DerivIndex::axis(1),
            ),
            (
                CoordPolynomial::constant(ParamScalar::from_int(2)),
                DerivIndex::none(),
            ),
        ]);
        assert_eq!(got, expect);
    }

    #[test]
    fn heisenberg_commutator() {
        // [d_x, x] = 1
        let dx = DiffOp::deriv(1);
        let x = DiffOp::from_polynomial(x_poly());
        assert_eq!(dx.commutator(&x), DiffOp::identity());
    }

    #[test]
    fn apply_examples() {
        let dx = DiffOp::deriv(1);
        let x2 = CoordPolynomial::monomial(CoordMonomial([0, 2, 0, 0]));
        let got = dx.apply(&x2);
        assert_eq!(
            got,
            CoordPolynomial::term(ParamScalar::from_int(2), CoordMonomial::var(1))
        );
    }

    #[test]
    fn constant_coefficient_operators_commute() {
        let a = DiffOp::from_terms(vec![
            (CoordPolynomial::constant(ParamScalar::i()), DerivIndex([1, 0, 0, 0])),
            (CoordPolynomial::one(), DerivIndex([0, 2, 0, 0])),
        ]);
        let b = DiffOp::from_terms(vec![
            (CoordPolynomial::constant(ParamScalar::from_int(3)), DerivIndex([0, 1, 1, 0])),
            (CoordPolynomial::one(), DerivIndex([0, 0, 0, 1])),
        ]);
        assert!(a.commutator(&b).is_zero());
    }
}
