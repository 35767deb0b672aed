//! Homogeneous linear systems over the parameter ring and their exact
//! nullspaces via fraction-free elimination.
//!
//! Entries stay in the Laurent ring throughout: row updates use
//! cross-multiplication and rows are reduced by their unit content
//! (monomial and rational) after each step, so no polynomial GCDs are
//! ever needed and every division is by a unit.

use crate::coord::{CoordMonomial, CoordPolynomial};
use crate::diffop::{DerivIndex, DiffOp};
use crate::param::{Param, ParamMonomial, ParamScalar};
use crate::scalar::GaussianRational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Homogeneous system: one row per equation, one column per unknown.
/// Entries must be free of the unknown symbols themselves.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    unknowns: Vec<Param>,
    rows: Vec<Vec<ParamScalar>>,
}

impl LinearSystem {
    pub fn new(unknowns: Vec<Param>) -> Self {
        Self {
            unknowns,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<ParamScalar>) {
        assert_eq!(row.len(), self.unknowns.len(), "row width mismatch");
        debug_assert!(
            row.iter().all(|e| !e.contains_unknown()),
            "system entry mentions an unknown symbol"
        );
        if row.iter().any(|e| !e.is_zero()) {
            self.rows.push(row);
        }
    }

    pub fn unknowns(&self) -> &[Param] {
        &self.unknowns
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_unknowns(&self) -> usize {
        self.unknowns.len()
    }

    pub fn rows(&self) -> &[Vec<ParamScalar>] {
        &self.rows
    }

    /// Basis of the exact nullspace. Deterministic given row and column
    /// order: pivots are chosen as the first nonzero entry in row-major
    /// order, free columns are processed in ascending order, and each
    /// basis vector is reduced by its unit content and scaled so the
    /// leading coefficient of its first nonzero entry is one.
    pub fn nullspace(&self) -> Vec<Vec<ParamScalar>> {
        let n = self.unknowns.len();
        let mut m: Vec<Vec<ParamScalar>> = self.rows.clone();
        let mut pivot_cols: Vec<usize> = Vec::new();

        // Forward pass to echelon form.
        let mut rank = 0usize;
        for col in 0..n {
            let Some(pivot_row) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, pivot_row);
            let pivot = m[rank][col].clone();
            for r in rank + 1..m.len() {
                if m[r][col].is_zero() {
                    continue;
                }
                let factor = m[r][col].clone();
                m[r] = row_combine(&m[r], &pivot, &m[rank], &factor);
                strip_content_slice(&mut m[r]);
            }
            pivot_cols.push(col);
            rank += 1;
        }
        m.truncate(rank);

        // Backward pass: clear entries above every pivot.
        for i in (0..rank).rev() {
            let col = pivot_cols[i];
            let pivot = m[i][col].clone();
            for r in 0..i {
                if m[r][col].is_zero() {
                    continue;
                }
                let factor = m[r][col].clone();
                m[r] = row_combine(&m[r], &pivot, &m[i], &factor);
                strip_content_slice(&mut m[r]);
            }
        }

        // One basis vector per free column.
        let pivots: Vec<ParamScalar> = (0..rank).map(|i| m[i][pivot_cols[i]].clone()).collect();
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; n];
            for &c in &pivot_cols {
                v[c] = true;
            }
            v
        };
        let full_product = pivots
            .iter()
            .fold(ParamScalar::one(), |acc, p| acc.mul(p));
        let mut basis = Vec::new();
        for f in 0..n {
            if is_pivot[f] {
                continue;
            }
            let mut v = vec![ParamScalar::zero(); n];
            v[f] = full_product.clone();
            for i in 0..rank {
                if m[i][f].is_zero() {
                    continue;
                }
                // -entry * product of the other pivots
                let mut scale = ParamScalar::one();
                for (j, p) in pivots.iter().enumerate() {
                    if j != i {
                        scale = scale.mul(p);
                    }
                }
                v[pivot_cols[i]] = m[i][f].neg().mul(&scale);
            }
            normalize_vector(&mut v);
            basis.push(v);
        }
        basis
    }

    /// Nullspace dimension without materializing the basis vectors.
    pub fn nullspace_dimension(&self) -> usize {
        self.nullspace().len()
    }
}

/// dst*pivot - src*factor, elementwise.
fn row_combine(
    dst: &[ParamScalar],
    pivot: &ParamScalar,
    src: &[ParamScalar],
    factor: &ParamScalar,
) -> Vec<ParamScalar> {
    dst.iter()
        .zip(src.iter())
        .map(|(d, s)| d.mul(pivot).sub(&s.mul(factor)))
        .collect()
}

fn monomial_min(a: &ParamMonomial, b: &ParamMonomial) -> ParamMonomial {
    let mut params: Vec<Param> = a.iter().map(|(p, _)| p).chain(b.iter().map(|(p, _)| p)).collect();
    params.sort();
    params.dedup();
    ParamMonomial::from_pairs(
        &params
            .into_iter()
            .map(|p| (p, a.exponent(p).min(b.exponent(p))))
            .collect::<Vec<_>>(),
    )
}

/// Divide a row by its common unit content: the per-parameter minimum
/// exponent over every term of every entry, and the GCD of all rational
/// coefficient data. Exact, since both are units of the ring.
fn strip_content_slice(row: &mut [ParamScalar]) {
    let mut mono: Option<ParamMonomial> = None;
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::one();
    for e in row.iter() {
        if e.is_zero() {
            continue;
        }
        let c = e.monomial_content();
        mono = Some(match mono {
            None => c,
            Some(m) => monomial_min(&m, &c),
        });
        for (g, _) in e.terms() {
            for part in [&g.re, &g.im] {
                if part.is_zero() {
                    continue;
                }
                num_gcd = num_gcd.gcd(&part.numer().abs());
                den_lcm = den_lcm.lcm(part.denom());
            }
        }
    }
    let Some(mono) = mono else {
        return;
    };
    let rat = BigRational::new(num_gcd, den_lcm);
    let unit = ParamScalar::term(
        GaussianRational::new(rat, BigRational::zero()),
        mono,
    );
    if unit.is_one() {
        return;
    }
    let inv = unit.unit_inv().expect("content is a unit");
    for e in row.iter_mut() {
        *e = e.mul(&inv);
    }
}

/// Strip content, then scale so the first nonzero entry has leading
/// rational coefficient one.
fn normalize_vector(v: &mut [ParamScalar]) {
    strip_content_slice(v);
    let lead = v.iter().find(|e| !e.is_zero()).and_then(|e| {
        e.leading_term().map(|(c, _)| c.clone())
    });
    if let Some(c) = lead {
        if !c.is_one() {
            let inv = ParamScalar::from_coeff(c.inv());
            for e in v.iter_mut() {
                *e = e.mul(&inv);
            }
        }
    }
}

/// Solve the inhomogeneous system `rows * x = rhs` exactly. Returns None
/// when no solution exists in the fraction field or when the solution is
/// not expressible in the Laurent ring.
pub fn solve_exact(
    rows: &[Vec<ParamScalar>],
    rhs: &[ParamScalar],
    num_unknowns: usize,
) -> Option<Vec<ParamScalar>> {
    assert_eq!(rows.len(), rhs.len());
    // Augment with a slack unknown carrying -rhs; any nullvector with a
    // nonzero slack component solves the original system after scaling.
    let unknowns: Vec<Param> = (0..=num_unknowns as u32).map(Param::Unknown).collect();
    let mut sys = LinearSystem::new(unknowns);
    for (row, b) in rows.iter().zip(rhs.iter()) {
        let mut r = row.clone();
        r.push(b.neg());
        sys.push_row(r);
    }
    let basis = sys.nullspace();
    let v = basis.iter().find(|v| !v[num_unknowns].is_zero())?;
    let denom = &v[num_unknowns];
    let mut x = Vec::with_capacity(num_unknowns);
    for j in 0..num_unknowns {
        x.push(v[j].exact_div(denom).ok()?);
    }
    Some(x)
}

/// All coordinate monomials of total degree at most `max_degree`, in
/// ascending graded-lex order.
pub fn monomials_up_to(max_degree: u32) -> Vec<CoordMonomial> {
    let mut out = Vec::new();
    let d = max_degree;
    for e0 in 0..=d {
        for e1 in 0..=d - e0 {
            for e2 in 0..=d - e0 - e1 {
                for e3 in 0..=d - e0 - e1 - e2 {
                    out.push(CoordMonomial([e0, e1, e2, e3]));
                }
            }
        }
    }
    out.sort();
    out
}

/// Find a coordinate polynomial zeta of degree <= max_degree with
/// `target = zeta * base`, by matching coefficients slot by slot.
pub fn solve_polynomial_multiple(
    target: &DiffOp,
    base: &DiffOp,
    max_degree: u32,
) -> Option<CoordPolynomial> {
    let monos = monomials_up_to(max_degree);
    // Operator for each candidate zeta monomial.
    let shifted: Vec<DiffOp> = monos
        .iter()
        .map(|m| base.mul_polynomial_left(&CoordPolynomial::monomial(*m)))
        .collect();

    // Union of coefficient slots.
    let mut slots: BTreeMap<(DerivIndex, CoordMonomial), usize> = BTreeMap::new();
    let mut collect = |op: &DiffOp| {
        for (d, p) in op.terms() {
            for (_, cm) in p.terms() {
                let k = slots.len();
                slots.entry((*d, *cm)).or_insert(k);
            }
        }
    };
    collect(target);
    for op in &shifted {
        collect(op);
    }

    let mut rows = vec![vec![ParamScalar::zero(); monos.len()]; slots.len()];
    let mut rhs = vec![ParamScalar::zero(); slots.len()];
    for ((d, cm), &slot) in &slots {
        rhs[slot] = target.coefficient(d).coefficient(cm);
        for (j, op) in shifted.iter().enumerate() {
            rows[slot][j] = op.coefficient(d).coefficient(cm);
        }
    }
    let x = solve_exact(&rows, &rhs, monos.len())?;
    Some(CoordPolynomial::from_terms(
        x.into_iter().zip(monos).map(|(s, m)| (s, m)).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(k: u32) -> Param {
        Param::Unknown(k)
    }

    #[test]
    fn single_equation_two_unknowns() {
        // u0 + u1 = 0 -> basis {(1, -1)}
        let mut sys = LinearSystem::new(vec![u(0), u(1)]);
        sys.push_row(vec![ParamScalar::one(), ParamScalar::one()]);
        let basis = sys.nullspace();
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0], vec![ParamScalar::one(), ParamScalar::from_int(-1)]);
    }

    #[test]
    fn symbolic_coefficients() {
        // hbar*u0 - m*u1 = 0 -> basis {(m, hbar)}
        let mut sys = LinearSystem::new(vec![u(0), u(1)]);
        sys.push_row(vec![
            ParamScalar::var(Param::Hbar),
            ParamScalar::var(Param::Mass).neg(),
        ]);
        let basis = sys.nullspace();
        assert_eq!(basis.len(), 1);
        assert_eq!(
            basis[0],
            vec![ParamScalar::var(Param::Mass), ParamScalar::var(Param::Hbar)]
        );
        // Substituting back kills the row exactly.
        let residual = ParamScalar::var(Param::Hbar)
            .mul(&basis[0][0])
            .sub(&ParamScalar::var(Param::Mass).mul(&basis[0][1]));
        assert!(residual.is_zero());
    }

    #[test]
    fn empty_system_full_dimension() {
        let sys = LinearSystem::new(vec![u(0), u(1), u(2)]);
        assert_eq!(sys.nullspace().len(), 3);
    }

    #[test]
    fn inhomogeneous_solve() {
        // x0 + x1 = 2, x0 - x1 = 0 -> x0 = x1 = 1
        let rows = vec![
            vec![ParamScalar::one(), ParamScalar::one()],
            vec![ParamScalar::one(), ParamScalar::from_int(-1)],
        ];
        let rhs = vec![ParamScalar::from_int(2), ParamScalar::zero()];
        let x = solve_exact(&rows, &rhs, 2).unwrap();
        assert_eq!(x, vec![ParamScalar::one(), ParamScalar::one()]);
    }

    #[test]
    fn inconsistent_solve_rejected() {
        let rows = vec![
            vec![ParamScalar::one(), ParamScalar::one()],
            vec![ParamScalar::one(), ParamScalar::one()],
        ];
        let rhs = vec![ParamScalar::from_int(1), ParamScalar::from_int(2)];
        assert!(solve_exact(&rows, &rhs, 2).is_none());
    }

    #[test]
    fn monomial_count() {
        assert_eq!(monomials_up_to(2).len(), 15);
        assert_eq!(monomials_up_to(0).len(), 1);
    }
}
