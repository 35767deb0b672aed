//! Polynomials in the four space-time coordinates with `ParamScalar`
//! coefficients. Coordinate 0 is t; 1, 2, 3 are x, y, z.

use crate::param::{ParamBinding, ParamError, ParamScalar};
use crate::scalar::GaussianRational;
use num_complex::Complex64;
use std::cmp::Ordering;
use std::fmt;

pub const COORD_NAMES: [char; 4] = ['t', 'x', 'y', 'z'];

/// Monomial in the coordinates: four nonnegative exponents.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct CoordMonomial(pub [u32; 4]);

impl CoordMonomial {
    pub fn one() -> Self {
        Self([0; 4])
    }

    pub fn var(axis: usize) -> Self {
        let mut e = [0; 4];
        e[axis] = 1;
        Self(e)
    }

    pub fn is_one(&self) -> bool {
        self.0 == [0; 4]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut e = [0; 4];
        for k in 0..4 {
            e[k] = self.0[k] + other.0[k];
        }
        Self(e)
    }

    pub fn eval(&self, x: &[f64; 4]) -> f64 {
        let mut v = 1.0;
        for k in 0..4 {
            v *= x[k].powi(self.0[k] as i32);
        }
        v
    }
}

impl PartialOrd for CoordMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded lexicographic with t-major ties: total degree first, then the
/// monomial with the higher exponent on the earliest axis sorts first
/// (t before x before y before z at equal degree).
impl Ord for CoordMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

/// Canonical coordinate polynomial: terms sorted by monomial, merged,
/// zero-free.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct CoordPolynomial {
    terms: Vec<(ParamScalar, CoordMonomial)>, // ascending monomial order
}

impl CoordPolynomial {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(ParamScalar::one())
    }

    pub fn constant(s: ParamScalar) -> Self {
        Self::from_terms(vec![(s, CoordMonomial::one())])
    }

    pub fn var(axis: usize) -> Self {
        Self::from_terms(vec![(ParamScalar::one(), CoordMonomial::var(axis))])
    }

    pub fn monomial(m: CoordMonomial) -> Self {
        Self::from_terms(vec![(ParamScalar::one(), m)])
    }

    pub fn term(s: ParamScalar, m: CoordMonomial) -> Self {
        Self::from_terms(vec![(s, m)])
    }

    pub fn from_terms(terms: Vec<(ParamScalar, CoordMonomial)>) -> Self {
        let mut ts = terms;
        ts.sort_by(|a, b| a.1.cmp(&b.1));
        let mut out: Vec<(ParamScalar, CoordMonomial)> = Vec::with_capacity(ts.len());
        for (s, m) in ts {
            if let Some(last) = out.last_mut() {
                if last.1 == m {
                    last.0 = last.0.add(&s);
                    continue;
                }
            }
            out.push((s, m));
        }
        out.retain(|(s, _)| !s.is_zero());
        Self { terms: out }
    }

    pub fn terms(&self) -> &[(ParamScalar, CoordMonomial)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.iter().all(|(_, m)| m.is_one())
    }

    /// Total degree; None for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(_, m)| m.degree()).max()
    }

    pub fn coefficient(&self, m: &CoordMonomial) -> ParamScalar {
        self.terms
            .iter()
            .find(|(_, n)| n == m)
            .map(|(s, _)| s.clone())
            .unwrap_or_else(ParamScalar::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match self.terms[i].1.cmp(&other.terms[j].1) {
                Ordering::Less => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let s = self.terms[i].0.add(&other.terms[j].0);
                    if !s.is_zero() {
                        out.push((s, self.terms[i].1));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Self { terms: out }
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(s, m)| (s.neg(), *m)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (s1, m1) in &self.terms {
            for (s2, m2) in &other.terms {
                terms.push((s1.mul(s2), m1.mul(m2)));
            }
        }
        Self::from_terms(terms)
    }

    pub fn scale(&self, s: &ParamScalar) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self::from_terms(
            self.terms
                .iter()
                .map(|(s0, m)| (s0.mul(s), *m))
                .collect(),
        )
    }

    pub fn scale_coeff(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(s, m)| (s.scale(c), *m)).collect(),
        }
    }

    /// Partial derivative along one coordinate axis.
    pub fn derivative(&self, axis: usize) -> Self {
        let mut terms = Vec::new();
        for (s, m) in &self.terms {
            let e = m.0[axis];
            if e == 0 {
                continue;
            }
            let mut lower = m.0;
            lower[axis] = e - 1;
            terms.push((
                s.scale(&GaussianRational::from_int(e as i64)),
                CoordMonomial(lower),
            ));
        }
        Self::from_terms(terms)
    }

    /// Exact division of every coefficient by a scalar.
    pub fn exact_div_scalar(&self, s: &ParamScalar) -> Result<Self, ParamError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (c, m) in &self.terms {
            terms.push((c.exact_div(s)?, *m));
        }
        Ok(Self { terms })
    }

    pub fn contains_unknown(&self) -> bool {
        self.terms.iter().any(|(s, _)| s.contains_unknown())
    }

    pub fn eval(&self, binding: &ParamBinding, x: &[f64; 4]) -> Result<Complex64, ParamError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, m) in &self.terms {
            acc += s.eval(binding)? * m.eval(x);
        }
        Ok(acc)
    }
}

impl fmt::Display for CoordPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::display::polynomial_to_string(self))
    }
}
