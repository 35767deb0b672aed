//! Bounded-degree symmetry solving: build an ansatz operator with unknown
//! coefficients, project the nested-commutator condition
//! [L, [L, ... [L, Q]]] = zeta(x) L onto coefficient slots, solve the
//! resulting homogeneous linear system exactly, and certify the basis.

use crate::coord::{CoordMonomial, CoordPolynomial};
use crate::diffop::{DerivIndex, DiffOp, ReduceError};
use crate::linsys::{monomials_up_to, solve_exact, LinearSystem};
use crate::param::{Param, ParamScalar};
use std::collections::BTreeMap;
use thiserror::Error;

/// Shape of the ansatz operator Q = sum over derivative indices alpha
/// (1 <= |alpha| <= max_deriv_order) of xi_alpha(x) d^alpha, plus an
/// optional zero-order part eta(x), together with the degree bound on the
/// right-hand factor zeta.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnsatzSpec {
    /// Nesting depth of the commutator condition, >= 1.
    pub p: u32,
    /// Max coordinate degree of each derivative coefficient.
    pub deg_xi: u32,
    /// Max coordinate degree of the zero-order part; None suppresses it.
    pub deg_eta: Option<u32>,
    /// Max coordinate degree of the right-hand factor zeta.
    pub deg_zeta: u32,
    /// Highest derivative order kept in Q (1 = first-order ansatz).
    pub max_deriv_order: u32,
}

impl AnsatzSpec {
    /// First-order ansatz at depth 1 with degrees (2, 2, 1): the bounds
    /// that contain the full classical symmetry algebra.
    pub fn classical() -> Self {
        Self {
            p: 1,
            deg_xi: 2,
            deg_eta: Some(2),
            deg_zeta: 1,
            max_deriv_order: 1,
        }
    }

    /// Affine fields at depth 2 with eta suppressed and constant zeta.
    pub fn affine_depth_two() -> Self {
        Self {
            p: 2,
            deg_xi: 1,
            deg_eta: None,
            deg_zeta: 0,
            max_deriv_order: 1,
        }
    }

    /// Per-depth defaults: (2, 2, 1) for p = 1, (1, suppressed, 0) for
    /// p >= 2.
    pub fn default_for_depth(p: u32) -> Self {
        if p <= 1 {
            Self::classical()
        } else {
            Self {
                p,
                ..Self::affine_depth_two()
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymmetryError {
    #[error("solved generator failed re-verification (internal inconsistency)")]
    VerificationFailed,
    #[error("base operator is zero or has no constant-coefficient term")]
    MalformedBase,
}

/// Solved basis: generators with their right-hand factors, re-verified on
/// construction.
#[derive(Clone, Debug)]
pub struct SymmetryBasis {
    pub generators: Vec<DiffOp>,
    pub zetas: Vec<CoordPolynomial>,
    pub dimension: usize,
}

/// Ansatz bookkeeping: one unknown parameter per coefficient slot.
struct Ansatz {
    q_slots: Vec<(DerivIndex, CoordMonomial)>,
    zeta_slots: Vec<CoordMonomial>,
    unknowns: Vec<Param>,
}

impl Ansatz {
    fn build(spec: &AnsatzSpec) -> Self {
        assert!(spec.p >= 1, "depth must be at least 1");
        assert!(spec.max_deriv_order >= 1, "ansatz needs derivative terms");
        let mut q_slots = Vec::new();
        let mut derivs: Vec<DerivIndex> = Vec::new();
        let d = spec.max_deriv_order;
        for e0 in 0..=d {
            for e1 in 0..=d - e0 {
                for e2 in 0..=d - e0 - e1 {
                    for e3 in 0..=d - e0 - e1 - e2 {
                        let idx = DerivIndex([e0, e1, e2, e3]);
                        if idx.order() >= 1 {
                            derivs.push(idx);
                        }
                    }
                }
            }
        }
        derivs.sort();
        for idx in derivs {
            for m in monomials_up_to(spec.deg_xi) {
                q_slots.push((idx, m));
            }
        }
        if let Some(de) = spec.deg_eta {
            for m in monomials_up_to(de) {
                q_slots.push((DerivIndex::none(), m));
            }
        }
        let zeta_slots = monomials_up_to(spec.deg_zeta);
        let unknowns: Vec<Param> = (0..(q_slots.len() + zeta_slots.len()) as u32)
            .map(Param::Unknown)
            .collect();
        Self {
            q_slots,
            zeta_slots,
            unknowns,
        }
    }

    fn q_template(&self) -> DiffOp {
        DiffOp::from_terms(
            self.q_slots
                .iter()
                .enumerate()
                .map(|(k, (d, m))| {
                    (
                        CoordPolynomial::term(ParamScalar::var(self.unknowns[k]), *m),
                        *d,
                    )
                })
                .collect(),
        )
    }

    fn zeta_template(&self) -> CoordPolynomial {
        let base = self.q_slots.len();
        CoordPolynomial::from_terms(
            self.zeta_slots
                .iter()
                .enumerate()
                .map(|(k, m)| (ParamScalar::var(self.unknowns[base + k]), *m))
                .collect(),
        )
    }

    /// Substitute a solved coefficient vector back into the ansatz.
    fn instantiate(&self, v: &[ParamScalar]) -> (DiffOp, CoordPolynomial) {
        let gen = DiffOp::from_terms(
            self.q_slots
                .iter()
                .enumerate()
                .map(|(k, (d, m))| (CoordPolynomial::term(v[k].clone(), *m), *d))
                .collect(),
        );
        let base = self.q_slots.len();
        let zeta = CoordPolynomial::from_terms(
            self.zeta_slots
                .iter()
                .enumerate()
                .map(|(k, m)| (v[base + k].clone(), *m))
                .collect(),
        );
        (gen, zeta)
    }
}

/// The finite-degree projection of the determining equations: one
/// homogeneous row per (coordinate monomial, derivative index) coefficient
/// slot of nested_commutator(L, Q, p) - zeta * L, linear in the unknowns.
pub fn determining_system(l: &DiffOp, spec: &AnsatzSpec) -> LinearSystem {
    let (sys, _) = determining_system_with_ansatz(l, spec);
    sys
}

fn determining_system_with_ansatz(l: &DiffOp, spec: &AnsatzSpec) -> (LinearSystem, Ansatz) {
    assert!(
        !l.contains_unknown(),
        "base operator must be free of solver unknowns"
    );
    let ansatz = Ansatz::build(spec);
    let residual = DiffOp::nested_commutator(l, &ansatz.q_template(), spec.p)
        .sub(&l.mul_polynomial_left(&ansatz.zeta_template()));

    let index_of: BTreeMap<Param, usize> = ansatz
        .unknowns
        .iter()
        .enumerate()
        .map(|(k, p)| (*p, k))
        .collect();
    let mut sys = LinearSystem::new(ansatz.unknowns.clone());
    for (_, poly) in residual.terms() {
        for (scalar, _) in poly.terms() {
            let mut row = vec![ParamScalar::zero(); ansatz.unknowns.len()];
            let parts = scalar
                .split_linear_unknowns()
                .expect("determining residual must be linear in the unknowns");
            for (u, cofactor) in parts {
                let j = index_of[&u];
                row[j] = row[j].add(&cofactor);
            }
            sys.push_row(row);
        }
    }
    (sys, ansatz)
}

/// Solve the projected determining system and certify every generator by
/// an independent reduction of its nested commutator against L.
pub fn solve_symmetries(l: &DiffOp, spec: &AnsatzSpec) -> Result<SymmetryBasis, SymmetryError> {
    let (sys, ansatz) = determining_system_with_ansatz(l, spec);
    let basis = sys.nullspace();
    let mut generators = Vec::with_capacity(basis.len());
    let mut zetas = Vec::with_capacity(basis.len());
    for v in &basis {
        let (gen, zeta) = ansatz.instantiate(v);
        let nested = DiffOp::nested_commutator(l, &gen, spec.p);
        match nested.reduce_mod(l, spec.deg_zeta) {
            Ok(z) if z == zeta => {}
            Ok(_) | Err(ReduceError::NotMultiple) => {
                return Err(SymmetryError::VerificationFailed)
            }
            Err(ReduceError::MalformedBase) => return Err(SymmetryError::MalformedBase),
        }
        generators.push(gen);
        zetas.push(zeta);
    }
    let dimension = generators.len();
    Ok(SymmetryBasis {
        generators,
        zetas,
        dimension,
    })
}

/// Check one operator against the nested-commutator condition. Returns the
/// right-hand factor zeta when Q is a symmetry at depth p within the zeta
/// degree bound, None otherwise.
pub fn verify_symmetry(
    l: &DiffOp,
    q: &DiffOp,
    p: u32,
    max_zeta_degree: u32,
) -> Result<Option<CoordPolynomial>, SymmetryError> {
    let nested = DiffOp::nested_commutator(l, q, p);
    match nested.reduce_mod(l, max_zeta_degree) {
        Ok(zeta) => Ok(Some(zeta)),
        Err(ReduceError::NotMultiple) => Ok(None),
        Err(ReduceError::MalformedBase) => Err(SymmetryError::MalformedBase),
    }
}

/// Coefficient slots of a family of operators, as rows of a matrix whose
/// columns are the operators.
fn slot_matrix(ops: &[DiffOp]) -> (Vec<(DerivIndex, CoordMonomial)>, Vec<Vec<ParamScalar>>) {
    let mut slots: BTreeMap<(DerivIndex, CoordMonomial), usize> = BTreeMap::new();
    for op in ops {
        for (d, p) in op.terms() {
            for (_, m) in p.terms() {
                let k = slots.len();
                slots.entry((*d, *m)).or_insert(k);
            }
        }
    }
    let mut rows = vec![vec![ParamScalar::zero(); ops.len()]; slots.len()];
    for (j, op) in ops.iter().enumerate() {
        for (d, p) in op.terms() {
            for (s, m) in p.terms() {
                rows[slots[&(*d, *m)]][j] = s.clone();
            }
        }
    }
    let keys = {
        let mut v: Vec<_> = slots.into_iter().collect();
        v.sort_by_key(|&(_, k)| k);
        v.into_iter().map(|(key, _)| key).collect()
    };
    (keys, rows)
}

/// Expansion coefficients of `target` in the span of `basis`, when they
/// exist in the Laurent ring.
pub fn expand_in_basis(target: &DiffOp, basis: &[DiffOp]) -> Option<Vec<ParamScalar>> {
    let mut ops: Vec<DiffOp> = basis.to_vec();
    ops.push(target.clone());
    let (keys, rows) = slot_matrix(&ops);
    let rows_a: Vec<Vec<ParamScalar>> = rows.iter().map(|r| r[..basis.len()].to_vec()).collect();
    let rhs: Vec<ParamScalar> = keys
        .iter()
        .enumerate()
        .map(|(i, _)| rows[i][basis.len()].clone())
        .collect();
    solve_exact(&rows_a, &rhs, basis.len())
}

pub fn in_span(target: &DiffOp, basis: &[DiffOp]) -> bool {
    expand_in_basis(target, basis).is_some()
}

/// Structure constants of a generator family under the commutator, stored
/// for mu < nu with the antisymmetric completion implied.
#[derive(Clone, Debug)]
pub struct StructureTable {
    pub dimension: usize,
    constants: BTreeMap<(usize, usize, usize), ParamScalar>,
    pub closure_ok: bool,
    /// Pairs whose commutator fell outside the span, with the offending
    /// commutator.
    pub residuals: Vec<(usize, usize, DiffOp)>,
}

impl StructureTable {
    /// C_{mu nu sigma}, antisymmetry-aware.
    pub fn constant(&self, mu: usize, nu: usize, sigma: usize) -> ParamScalar {
        if mu == nu {
            return ParamScalar::zero();
        }
        if mu < nu {
            self.constants
                .get(&(mu, nu, sigma))
                .cloned()
                .unwrap_or_else(ParamScalar::zero)
        } else {
            self.constant(nu, mu, sigma).neg()
        }
    }

    pub fn nonzero_entries(&self) -> impl Iterator<Item = (&(usize, usize, usize), &ParamScalar)> {
        self.constants.iter()
    }

    /// Jacobi constraint over the closed table:
    /// sum over lambda of C_{mu nu lambda} C_{lambda sigma tau} + cyclic = 0.
    pub fn jacobi_holds(&self) -> bool {
        if !self.closure_ok {
            return false;
        }
        let n = self.dimension;
        for mu in 0..n {
            for nu in mu + 1..n {
                for sigma in nu + 1..n {
                    for tau in 0..n {
                        let mut acc = ParamScalar::zero();
                        for lambda in 0..n {
                            acc = acc.add(
                                &self
                                    .constant(mu, nu, lambda)
                                    .mul(&self.constant(lambda, sigma, tau)),
                            );
                            acc = acc.add(
                                &self
                                    .constant(nu, sigma, lambda)
                                    .mul(&self.constant(lambda, mu, tau)),
                            );
                            acc = acc.add(
                                &self
                                    .constant(sigma, mu, lambda)
                                    .mul(&self.constant(lambda, nu, tau)),
                            );
                        }
                        if !acc.is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Expand every pairwise commutator of the basis in the basis itself.
/// A failed expansion is reported as data (closure_ok = false plus the
/// residual commutator), not as an error.
pub fn structure_constants(basis: &[DiffOp]) -> StructureTable {
    let n = basis.len();
    let mut constants = BTreeMap::new();
    let mut residuals = Vec::new();
    for mu in 0..n {
        for nu in mu + 1..n {
            let bracket = basis[mu].commutator(&basis[nu]);
            if bracket.is_zero() {
                continue;
            }
            match expand_in_basis(&bracket, basis) {
                Some(coeffs) => {
                    for (sigma, c) in coeffs.into_iter().enumerate() {
                        if !c.is_zero() {
                            constants.insert((mu, nu, sigma), c);
                        }
                    }
                }
                None => residuals.push((mu, nu, bracket)),
            }
        }
    }
    StructureTable {
        dimension: n,
        closure_ok: residuals.is_empty(),
        constants,
        residuals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn constant_ansatz_depth_one() {
        // Constant-coefficient ansatz: 6 unknowns, zeta forced to zero,
        // dimension 5.
        let spec = AnsatzSpec {
            p: 1,
            deg_xi: 0,
            deg_eta: Some(0),
            deg_zeta: 0,
            max_deriv_order: 1,
        };
        let l = catalog::schrodinger();
        let sys = determining_system(&l, &spec);
        assert_eq!(sys.num_unknowns(), 6);
        let basis = solve_symmetries(&l, &spec).unwrap();
        assert_eq!(basis.dimension, 5);
        assert!(basis.zetas.iter().all(|z| z.is_zero()));
    }

    #[test]
    fn affine_depth_two_dimension_twenty() {
        let l = catalog::schrodinger();
        let basis = solve_symmetries(&l, &AnsatzSpec::affine_depth_two()).unwrap();
        assert_eq!(basis.dimension, 20);
        // Span equality with the catalog generators.
        let solved: Vec<DiffOp> = basis.generators.clone();
        let cat: Vec<DiffOp> = catalog::affine_generators()
            .into_iter()
            .map(|(_, op)| op)
            .collect();
        for g in &cat {
            assert!(in_span(g, &solved), "catalog generator missing from solved span");
        }
        for g in &solved {
            assert!(in_span(g, &cat), "solved generator outside catalog span");
        }
    }

    #[test]
    fn affine_structure_constants_match_kronecker_form() {
        let gens: Vec<DiffOp> = catalog::affine_generators()
            .into_iter()
            .map(|(_, op)| op)
            .collect();
        let table = structure_constants(&gens);
        assert!(table.closure_ok);
        // Index layout: translations 0..4, then g_{ab} at 4 + 4a + b.
        let p = |a: usize| a;
        let g = |a: usize, b: usize| 4 + 4 * a + b;
        let delta = |a: usize, b: usize| a == b;
        for a in 0..4 {
            for b in 0..4 {
                for sigma in 0..20 {
                    assert!(table.constant(p(a), p(b), sigma).is_zero());
                }
                for c in 0..4 {
                    for sigma in 0..20 {
                        let expect = if delta(a, b) && sigma == p(c) {
                            ParamScalar::one()
                        } else {
                            ParamScalar::zero()
                        };
                        assert_eq!(table.constant(p(a), g(b, c), sigma), expect);
                    }
                    for d in 0..4 {
                        for sigma in 0..20 {
                            let mut expect = ParamScalar::zero();
                            if delta(b, c) && sigma == g(a, d) {
                                expect = expect.add(&ParamScalar::one());
                            }
                            if delta(a, d) && sigma == g(c, b) {
                                expect = expect.sub(&ParamScalar::one());
                            }
                            assert_eq!(
                                table.constant(g(a, b), g(c, d), sigma),
                                expect,
                                "[g{a}{b}, g{c}{d}] at sigma={sigma}"
                            );
                        }
                    }
                }
            }
        }
        assert!(table.jacobi_holds());
    }

    #[test]
    fn open_basis_reports_residual() {
        // [d_x, x^2 d_x] = 2 x d_x falls outside span{d_x, x^2 d_x}.
        let dx = DiffOp::deriv(1);
        let x2dx = catalog::monomial_field(&[1, 1], 1);
        let table = structure_constants(&[dx, x2dx]);
        assert!(!table.closure_ok);
        assert_eq!(table.residuals.len(), 1);
        let expect = catalog::monomial_field(&[1], 1).scale(&ParamScalar::from_int(2));
        assert_eq!(table.residuals[0].2, expect);
    }

    #[test]
    fn verify_boost_depths() {
        let l = catalog::schrodinger();
        let m01 = catalog::lorentz_boost(1);
        assert_eq!(verify_symmetry(&l, &m01, 1, 1).unwrap(), None);
        assert_eq!(
            verify_symmetry(&l, &m01, 2, 1).unwrap(),
            Some(CoordPolynomial::zero())
        );
    }

    #[test]
    fn verify_quadratic_conformal() {
        let l = catalog::schrodinger();
        let zeta = verify_symmetry(&l, &catalog::quadratic_conformal(), 2, 1)
            .unwrap()
            .unwrap();
        let expect = CoordPolynomial::constant(
            ParamScalar::from_int(4)
                .mul(&ParamScalar::i())
                .mul(&ParamScalar::var(Param::Hbar)),
        );
        assert_eq!(zeta, expect);
    }
}
