//! The exact coefficient ring: Laurent polynomials in symbolic physical
//! parameters over Gaussian rationals.
//!
//! Monomials may carry negative exponents (so `hbar^2/m` is a single
//! monomial, not a fraction). Solver unknowns are ordinary parameters with
//! reserved names `u0`, `u1`, ... so ansatz arithmetic reuses this ring.

use crate::scalar::GaussianRational;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Symbolic parameter universe.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Param {
    /// Reduced Planck constant, printed `hbar`.
    Hbar,
    /// Particle mass, printed `m`.
    Mass,
    /// Rest mass, printed `m0`.
    RestMass,
    /// Speed of light, printed `c`.
    LightSpeed,
    /// Boost speed, printed `V`.
    BoostSpeed,
    /// Relativistic energy symbol, printed `W`.
    Energy,
    /// Solver unknown, printed `u{k}`. Reserved: never appears in results
    /// returned to callers outside the solver.
    Unknown(u32),
}

impl Param {
    pub fn name(&self) -> String {
        match self {
            Param::Hbar => "hbar".into(),
            Param::Mass => "m".into(),
            Param::RestMass => "m0".into(),
            Param::LightSpeed => "c".into(),
            Param::BoostSpeed => "V".into(),
            Param::Energy => "W".into(),
            Param::Unknown(k) => format!("u{k}"),
        }
    }

    pub fn from_name(s: &str) -> Option<Param> {
        match s {
            "hbar" => Some(Param::Hbar),
            "m" => Some(Param::Mass),
            "m0" => Some(Param::RestMass),
            "c" => Some(Param::LightSpeed),
            "V" => Some(Param::BoostSpeed),
            "W" => Some(Param::Energy),
            _ => {
                let rest = s.strip_prefix('u')?;
                rest.parse::<u32>().ok().map(Param::Unknown)
            }
        }
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Param::Unknown(_))
    }
}

/// Numeric values for parameters, used when leaving the exact world.
#[derive(Clone, Debug, Default)]
pub struct ParamBinding {
    values: BTreeMap<Param, f64>,
}

impl ParamBinding {
    pub fn new() -> Self {
        Self::default()
    }

    /// hbar = m = m0 = c = 1.
    pub fn natural_units() -> Self {
        let mut b = Self::new();
        b.set(Param::Hbar, 1.0);
        b.set(Param::Mass, 1.0);
        b.set(Param::RestMass, 1.0);
        b.set(Param::LightSpeed, 1.0);
        b
    }

    pub fn set(&mut self, p: Param, v: f64) -> &mut Self {
        self.values.insert(p, v);
        self
    }

    pub fn get(&self, p: Param) -> Option<f64> {
        self.values.get(&p).copied()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamError {
    #[error("division by zero scalar")]
    DivisionByZero,
    #[error("no exact quotient exists in the Laurent ring")]
    NotDivisible,
    #[error("parameter `{0}` has no bound numeric value")]
    Unbound(String),
}

/// Laurent monomial in the parameters: map from parameter to nonzero
/// integer exponent.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ParamMonomial {
    exps: Vec<(Param, i32)>, // sorted by Param, exponents nonzero
}

impl ParamMonomial {
    pub fn one() -> Self {
        Self { exps: Vec::new() }
    }

    pub fn var(p: Param) -> Self {
        Self::var_pow(p, 1)
    }

    pub fn var_pow(p: Param, e: i32) -> Self {
        if e == 0 {
            Self::one()
        } else {
            Self { exps: vec![(p, e)] }
        }
    }

    pub fn from_pairs(pairs: &[(Param, i32)]) -> Self {
        let mut m = BTreeMap::new();
        for &(p, e) in pairs {
            *m.entry(p).or_insert(0) += e;
        }
        Self {
            exps: m.into_iter().filter(|&(_, e)| e != 0).collect(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, p: Param) -> i32 {
        self.exps
            .iter()
            .find(|&&(q, _)| q == p)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Param, i32)> + '_ {
        self.exps.iter().copied()
    }

    pub fn total_degree(&self) -> i64 {
        self.exps.iter().map(|&(_, e)| e as i64).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            match self.exps[i].0.cmp(&other.exps[j].0) {
                Ordering::Less => {
                    out.push(self.exps[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.exps[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    let e = self.exps[i].1 + other.exps[j].1;
                    if e != 0 {
                        out.push((self.exps[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.exps[i..]);
        out.extend_from_slice(&other.exps[j..]);
        Self { exps: out }
    }

    /// Monomials are units of the Laurent ring: division never fails.
    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }

    pub fn inv(&self) -> Self {
        Self {
            exps: self.exps.iter().map(|&(p, e)| (p, -e)).collect(),
        }
    }

    pub fn contains_unknown(&self) -> bool {
        self.exps.iter().any(|(p, _)| p.is_unknown())
    }

    /// Graded lexicographic order: by total degree, then by exponent
    /// sequence walking the parameter universe in its fixed order.
    pub fn cmp_graded(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Walk the union of parameters in order; missing exponent = 0.
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.exps.get(i), other.exps.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(&(p, e)), Some(&(q, f))) => match p.cmp(&q) {
                    Ordering::Less => {
                        // self has p with exponent e, other has 0 there
                        match e.cmp(&0) {
                            Ordering::Equal => unreachable!(),
                            ord => return ord,
                        }
                    }
                    Ordering::Greater => match 0.cmp(&f) {
                        Ordering::Equal => unreachable!(),
                        ord => return ord,
                    },
                    Ordering::Equal => {
                        match e.cmp(&f) {
                            Ordering::Equal => {}
                            ord => return ord,
                        }
                        i += 1;
                        j += 1;
                    }
                },
                (Some(&(_, e)), None) => return e.cmp(&0),
                (None, Some(&(_, f))) => return 0.cmp(&f),
            }
        }
    }

    pub fn eval(&self, binding: &ParamBinding) -> Result<f64, ParamError> {
        let mut v = 1.0;
        for (p, e) in self.iter() {
            let x = binding.get(p).ok_or_else(|| ParamError::Unbound(p.name()))?;
            v *= x.powi(e);
        }
        Ok(v)
    }
}

impl PartialOrd for ParamMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ParamMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_graded(other)
    }
}

/// Canonical sum of (GaussianRational, ParamMonomial) terms: sorted by
/// monomial, merged, zero-free. Structural equality is ring equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ParamScalar {
    terms: Vec<(GaussianRational, ParamMonomial)>, // ascending monomial order
}

impl ParamScalar {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_coeff(GaussianRational::one())
    }

    pub fn i() -> Self {
        Self::from_coeff(GaussianRational::i())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_coeff(GaussianRational::from_int(n))
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_coeff(GaussianRational::from_ratio(p, q))
    }

    pub fn from_coeff(c: GaussianRational) -> Self {
        Self::from_terms(vec![(c, ParamMonomial::one())])
    }

    pub fn var(p: Param) -> Self {
        Self::from_terms(vec![(GaussianRational::one(), ParamMonomial::var(p))])
    }

    pub fn var_pow(p: Param, e: i32) -> Self {
        Self::from_terms(vec![(GaussianRational::one(), ParamMonomial::var_pow(p, e))])
    }

    pub fn term(c: GaussianRational, m: ParamMonomial) -> Self {
        Self::from_terms(vec![(c, m)])
    }

    /// Canonicalize an arbitrary term list: sort, merge, drop zeros.
    pub fn from_terms(terms: Vec<(GaussianRational, ParamMonomial)>) -> Self {
        let mut ts = terms;
        ts.sort_by(|a, b| a.1.cmp(&b.1));
        let mut out: Vec<(GaussianRational, ParamMonomial)> = Vec::with_capacity(ts.len());
        for (c, m) in ts {
            if let Some(last) = out.last_mut() {
                if last.1 == m {
                    last.0 = &last.0 + &c;
                    continue;
                }
            }
            out.push((c, m));
        }
        out.retain(|(c, _)| !c.is_zero());
        Self { terms: out }
    }

    pub fn terms(&self) -> &[(GaussianRational, ParamMonomial)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    /// Single-term scalars are units of the Laurent ring.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn contains_unknown(&self) -> bool {
        self.terms.iter().any(|(_, m)| m.contains_unknown())
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
                    let c = &self.terms[i].0 + &other.terms[j].0;
                    if !c.is_zero() {
                        out.push((c, self.terms[i].1.clone()));
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
            terms: self.terms.iter().map(|(c, m)| (-c, m.clone())).collect(),
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
        for (c1, m1) in &self.terms {
            for (c2, m2) in &other.terms {
                terms.push((c1 * c2, m1.mul(m2)));
            }
        }
        Self::from_terms(terms)
    }

    pub fn mul_term(&self, c: &GaussianRational, m: &ParamMonomial) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(c0, m0)| (c0 * c, m0.mul(m)))
                .collect(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(c0, m)| (c0 * c, m.clone())).collect(),
        }
    }

    /// Leading term under the graded-lex monomial order (the maximum).
    pub fn leading_term(&self) -> Option<(&GaussianRational, &ParamMonomial)> {
        self.terms.last().map(|(c, m)| (c, m))
    }

    /// Inverse of a single-term scalar. None for zero or multi-term input.
    pub fn unit_inv(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (c, m) = &self.terms[0];
        Some(Self::term(c.inv(), m.inv()))
    }

    /// Exact division in the Laurent ring. Returns q with q*b = a whenever
    /// such q exists (single-term divisors always divide since monomials
    /// and Gaussian rationals are units); NotDivisible otherwise.
    pub fn exact_div(&self, b: &Self) -> Result<Self, ParamError> {
        if b.is_zero() {
            return Err(ParamError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        if let Some(binv) = b.unit_inv() {
            return Ok(self.mul(&binv));
        }
        // Multi-term divisor: shift both operands into the polynomial cone
        // (divide out per-parameter minimum exponents, a unit) and run
        // multivariate long division by the graded-lex leading term there.
        // Exactness in the Laurent ring is equivalent to exactness of the
        // shifted polynomial division since minimum exponents of a product
        // add in an integral domain.
        let a_shift = monomial_floor(&self.terms);
        let b_shift = monomial_floor(&b.terms);
        let a0 = self.mul_term(&GaussianRational::one(), &a_shift.inv());
        let b0 = b.mul_term(&GaussianRational::one(), &b_shift.inv());
        let (lead_c, lead_m) = {
            let (c, m) = b0.leading_term().unwrap();
            (c.clone(), m.clone())
        };
        let lead_c_inv = lead_c.inv();
        let mut remainder = a0;
        let mut quotient_terms: Vec<(GaussianRational, ParamMonomial)> = Vec::new();
        while let Some((rc, rm)) = remainder.leading_term() {
            let t_mono = rm.div(&lead_m);
            if t_mono.iter().any(|(_, e)| e < 0) {
                return Err(ParamError::NotDivisible);
            }
            let t_coeff = rc * &lead_c_inv;
            quotient_terms.push((t_coeff.clone(), t_mono.clone()));
            let t = Self::term(t_coeff, t_mono);
            remainder = remainder.sub(&t.mul(&b0));
        }
        let q0 = Self::from_terms(quotient_terms);
        Ok(q0.mul_term(&GaussianRational::one(), &a_shift.div(&b_shift)))
    }

    /// Per-parameter minimum exponent over all terms, as a monomial. For a
    /// nonzero scalar s, s / monomial_content has polynomial support with a
    /// zero minimum exponent in every parameter it mentions.
    pub fn monomial_content(&self) -> ParamMonomial {
        monomial_floor(&self.terms)
    }

    /// Positive rational g such that dividing every coefficient component
    /// by g yields coprime integer data: g = gcd(numerators)/lcm(denominators)
    /// over all re/im parts.
    pub fn rational_content(&self) -> Option<BigRational> {
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for (c, _) in &self.terms {
            for part in [&c.re, &c.im] {
                if part.is_zero() {
                    continue;
                }
                num_gcd = num_gcd.gcd(&part.numer().abs());
                den_lcm = den_lcm.lcm(part.denom());
            }
        }
        if num_gcd.is_zero() {
            None
        } else {
            Some(BigRational::new(num_gcd, den_lcm))
        }
    }

    /// Split off the factor of one unknown parameter per term, reporting
    /// (unknown, cofactor) pairs. Errors if any term is not exactly linear
    /// in the unknowns.
    pub fn split_linear_unknowns(&self) -> Result<Vec<(Param, Self)>, String> {
        let mut out: Vec<(Param, Self)> = Vec::new();
        for (c, m) in &self.terms {
            let unknowns: Vec<(Param, i32)> =
                m.iter().filter(|(p, _)| p.is_unknown()).collect();
            match unknowns.as_slice() {
                [(u, 1)] => {
                    let rest = m.div(&ParamMonomial::var(*u));
                    out.push((*u, Self::term(c.clone(), rest)));
                }
                [] => return Err("term free of unknowns in a homogeneous slot".into()),
                _ => return Err("term not linear in the unknowns".into()),
            }
        }
        Ok(out)
    }

    pub fn eval(&self, binding: &ParamBinding) -> Result<Complex64, ParamError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, m) in &self.terms {
            acc += c.to_complex64() * m.eval(binding)?;
        }
        Ok(acc)
    }
}

fn monomial_floor(terms: &[(GaussianRational, ParamMonomial)]) -> ParamMonomial {
    let mut params: Vec<Param> = terms
        .iter()
        .flat_map(|(_, m)| m.iter().map(|(p, _)| p))
        .collect();
    params.sort();
    params.dedup();
    let mins: Vec<(Param, i32)> = params
        .into_iter()
        .map(|p| (p, terms.iter().map(|(_, m)| m.exponent(p)).min().unwrap()))
        .collect();
    ParamMonomial::from_pairs(&mins)
}

impl fmt::Display for ParamScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::display::scalar_to_string(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hbar() -> ParamScalar {
        ParamScalar::var(Param::Hbar)
    }
    fn mass() -> ParamScalar {
        ParamScalar::var(Param::Mass)
    }

    #[test]
    fn exponent_addition() {
        // hbar*m^-1 times hbar*m = hbar^2
        let a = hbar().mul(&ParamScalar::var_pow(Param::Mass, -1));
        let b = hbar().mul(&mass());
        assert_eq!(a.mul(&b), ParamScalar::var_pow(Param::Hbar, 2));
    }

    #[test]
    fn like_term_merge() {
        // (1/2) hbar^2 m^-1 + (1/2) hbar^2 m^-1 = hbar^2 m^-1
        let t = ParamScalar::term(
            GaussianRational::from_ratio(1, 2),
            ParamMonomial::from_pairs(&[(Param::Hbar, 2), (Param::Mass, -1)]),
        );
        let sum = t.add(&t);
        let expect = ParamScalar::term(
            GaussianRational::one(),
            ParamMonomial::from_pairs(&[(Param::Hbar, 2), (Param::Mass, -1)]),
        );
        assert_eq!(sum, expect);
    }

    #[test]
    fn gaussian_unit() {
        assert_eq!(ParamScalar::i().mul(&ParamScalar::i()), ParamScalar::from_int(-1));
    }

    #[test]
    fn exact_division_by_unit() {
        // 4i hbar^2 m^-1 / (i hbar) = 4 hbar m^-1
        let a = ParamScalar::term(
            &GaussianRational::from_int(4) * &GaussianRational::i(),
            ParamMonomial::from_pairs(&[(Param::Hbar, 2), (Param::Mass, -1)]),
        );
        let b = ParamScalar::term(GaussianRational::i(), ParamMonomial::var(Param::Hbar));
        let q = a.exact_div(&b).unwrap();
        let expect = ParamScalar::term(
            GaussianRational::from_int(4),
            ParamMonomial::from_pairs(&[(Param::Hbar, 1), (Param::Mass, -1)]),
        );
        assert_eq!(q, expect);
        assert_eq!(ParamScalar::zero().exact_div(&b).unwrap(), ParamScalar::zero());
    }

    #[test]
    fn unit_divisors_always_divide() {
        // hbar is a unit of the Laurent ring, so (hbar + m)/hbar exists
        // and equals 1 + m*hbar^-1. Confirmed by multiplying back.
        let a = hbar().add(&mass());
        let q = a.exact_div(&hbar()).unwrap();
        assert_eq!(q.mul(&hbar()), a);
        let expect = ParamScalar::one().add(&ParamScalar::term(
            GaussianRational::one(),
            ParamMonomial::from_pairs(&[(Param::Mass, 1), (Param::Hbar, -1)]),
        ));
        assert_eq!(q, expect);
    }

    #[test]
    fn genuine_non_divisibility() {
        // hbar^2 + m is not a multiple of hbar + m.
        let a = ParamScalar::var_pow(Param::Hbar, 2).add(&mass());
        let b = hbar().add(&mass());
        assert_eq!(a.exact_div(&b), Err(ParamError::NotDivisible));
    }

    #[test]
    fn exact_division_multiterm_roundtrip() {
        let a = hbar().add(&mass()).mul(&hbar().add(&ParamScalar::from_int(2)));
        let b = hbar().add(&mass());
        assert_eq!(a.exact_div(&b).unwrap(), hbar().add(&ParamScalar::from_int(2)));
    }

    #[test]
    fn laurent_multiterm_division() {
        // (1 + m*hbar^-1)*(hbar + m) / (hbar + m) must come back exactly.
        let q0 = ParamScalar::one().add(&ParamScalar::term(
            GaussianRational::one(),
            ParamMonomial::from_pairs(&[(Param::Mass, 1), (Param::Hbar, -1)]),
        ));
        let b = hbar().add(&mass());
        let a = q0.mul(&b);
        assert_eq!(a.exact_div(&b).unwrap(), q0);
    }

    #[test]
    fn canonicalization_idempotent() {
        let raw = vec![
            (GaussianRational::from_int(1), ParamMonomial::var(Param::Mass)),
            (GaussianRational::from_int(-1), ParamMonomial::var(Param::Mass)),
            (GaussianRational::from_ratio(1, 3), ParamMonomial::one()),
        ];
        let s = ParamScalar::from_terms(raw);
        let again = ParamScalar::from_terms(s.terms().to_vec());
        assert_eq!(s, again);
        assert_eq!(s, ParamScalar::from_ratio(1, 3));
    }
}
