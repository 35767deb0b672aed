//! Named operators: the free-particle evolution operators, the thirteen
//! first-order symmetry generators of the free Schrodinger operator, the
//! twenty affine generators, the two special quadratic fields, and the
//! monomial vector fields.
//!
//! Conventions: coordinate 0 is t (not ct); the speed of light appears as
//! the explicit symbol `c` where an operator needs it. Spatial axes are
//! 1, 2, 3 = x, y, z.

use crate::coord::{CoordMonomial, CoordPolynomial};
use crate::diffop::{DerivIndex, DiffOp};
use crate::param::{Param, ParamMonomial, ParamScalar};
use crate::scalar::GaussianRational;

fn i_scalar() -> ParamScalar {
    ParamScalar::i()
}

fn hbar() -> ParamScalar {
    ParamScalar::var(Param::Hbar)
}

/// hbar^a * m^b * c^d as a single monomial with rational coefficient p/q.
fn phys(p: i64, q: i64, a: i32, b: i32, d: i32) -> ParamScalar {
    ParamScalar::term(
        GaussianRational::from_ratio(p, q),
        ParamMonomial::from_pairs(&[
            (Param::Hbar, a),
            (Param::Mass, b),
            (Param::LightSpeed, d),
        ]),
    )
}

/// Laplacian over the spatial axes.
pub fn laplacian() -> DiffOp {
    let mut op = DiffOp::zero();
    for k in 1..4 {
        let mut e = [0u32; 4];
        e[k] = 2;
        op = op.add(&DiffOp::single(CoordPolynomial::one(), DerivIndex(e)));
    }
    op
}

/// i*hbar*d_t + (hbar^2/2m) * Laplacian — the free evolution operator.
pub fn schrodinger() -> DiffOp {
    DiffOp::single(
        CoordPolynomial::constant(i_scalar().mul(&hbar())),
        DerivIndex::axis(0),
    )
    .add(&laplacian().scale(&phys(1, 2, 2, -1, 0)))
}

/// i*hbar*d_t + (c^2 hbar^2 / 2W) * Laplacian, with W an independent symbol.
pub fn schrodinger_relativistic() -> DiffOp {
    let coeff = ParamScalar::term(
        GaussianRational::from_ratio(1, 2),
        ParamMonomial::from_pairs(&[
            (Param::LightSpeed, 2),
            (Param::Hbar, 2),
            (Param::Energy, -1),
        ]),
    );
    DiffOp::single(
        CoordPolynomial::constant(i_scalar().mul(&hbar())),
        DerivIndex::axis(0),
    )
    .add(&laplacian().scale(&coeff))
}

/// c^-2 d_tt - Laplacian — the wave operator in t-coordinates.
pub fn dalembert() -> DiffOp {
    DiffOp::single(
        CoordPolynomial::constant(ParamScalar::var_pow(Param::LightSpeed, -2)),
        DerivIndex([2, 0, 0, 0]),
    )
    .sub(&laplacian())
}

/// Boost generator mixing t with a spatial axis in metric form:
/// c*t*d_k + (x^k/c)*d_t for k = 1, 2, 3.
pub fn lorentz_boost(k: usize) -> DiffOp {
    assert!((1..=3).contains(&k), "spatial axis expected");
    DiffOp::single(
        CoordPolynomial::term(ParamScalar::var(Param::LightSpeed), CoordMonomial::var(0)),
        DerivIndex::axis(k),
    )
    .add(&DiffOp::single(
        CoordPolynomial::term(
            ParamScalar::var_pow(Param::LightSpeed, -1),
            CoordMonomial::var(k),
        ),
        DerivIndex::axis(0),
    ))
}

/// Translation generator d_a for any axis.
pub fn translation(a: usize) -> DiffOp {
    DiffOp::deriv(a)
}

/// Affine generator x^a d_b.
pub fn linear_field(a: usize, b: usize) -> DiffOp {
    DiffOp::single(CoordPolynomial::var(a), DerivIndex::axis(b))
}

/// Monomial vector field (product of the listed coordinates) * d_target.
pub fn monomial_field(coords: &[usize], target: usize) -> DiffOp {
    let mut e = [0u32; 4];
    for &c in coords {
        e[c] += 1;
    }
    DiffOp::single(
        CoordPolynomial::monomial(CoordMonomial(e)),
        DerivIndex::axis(target),
    )
}

/// The twenty generators of inhomogeneous linear transformations:
/// four translations then the sixteen x^a d_b fields, row-major in (a, b).
pub fn affine_generators() -> Vec<(String, DiffOp)> {
    let mut out = Vec::with_capacity(20);
    for a in 0..4 {
        out.push((format!("p{a}"), translation(a)));
    }
    for a in 0..4 {
        for b in 0..4 {
            out.push((format!("g{a}{b}"), linear_field(a, b)));
        }
    }
    out
}

/// Time translation i*d_t.
pub fn energy() -> DiffOp {
    DiffOp::single(CoordPolynomial::constant(i_scalar()), DerivIndex::axis(0))
}

/// Momentum -i*d_k.
pub fn momentum(k: usize) -> DiffOp {
    DiffOp::single(
        CoordPolynomial::constant(i_scalar().neg()),
        DerivIndex::axis(k),
    )
}

/// Angular momentum about axis k: -i (x^j d_l - x^l d_j) with (k, j, l)
/// a cyclic permutation of (1, 2, 3).
pub fn rotation(k: usize) -> DiffOp {
    let (j, l) = match k {
        1 => (2, 3),
        2 => (3, 1),
        3 => (1, 2),
        _ => panic!("spatial axis expected"),
    };
    DiffOp::single(CoordPolynomial::var(j), DerivIndex::axis(l))
        .sub(&DiffOp::single(CoordPolynomial::var(l), DerivIndex::axis(j)))
        .scale(&i_scalar().neg())
}

/// Galilei boost generator i*t*d_k + (m/hbar) x^k.
pub fn galilei_boost(k: usize) -> DiffOp {
    DiffOp::single(
        CoordPolynomial::term(i_scalar(), CoordMonomial::var(0)),
        DerivIndex::axis(k),
    )
    .add(&DiffOp::from_polynomial(CoordPolynomial::term(
        ParamScalar::term(
            GaussianRational::one(),
            ParamMonomial::from_pairs(&[(Param::Mass, 1), (Param::Hbar, -1)]),
        ),
        CoordMonomial::var(k),
    )))
}

/// Central element m/hbar (a constant multiple of the identity).
pub fn central_mass() -> DiffOp {
    DiffOp::from_polynomial(CoordPolynomial::constant(ParamScalar::term(
        GaussianRational::one(),
        ParamMonomial::from_pairs(&[(Param::Mass, 1), (Param::Hbar, -1)]),
    )))
}

/// Dilation i(2t*d_t + x^k d_k + 3/2).
pub fn dilation() -> DiffOp {
    let mut op = DiffOp::single(
        CoordPolynomial::term(ParamScalar::from_int(2), CoordMonomial::var(0)),
        DerivIndex::axis(0),
    );
    for k in 1..4 {
        op = op.add(&DiffOp::single(CoordPolynomial::var(k), DerivIndex::axis(k)));
    }
    op = op.add(&DiffOp::from_polynomial(CoordPolynomial::constant(
        ParamScalar::from_ratio(3, 2),
    )));
    op.scale(&i_scalar())
}

/// Conformal generator -i(t^2 d_t + t x^k d_k + (3/2) t) - (m/2hbar) x^2.
pub fn conformal() -> DiffOp {
    let t2 = CoordPolynomial::monomial(CoordMonomial([2, 0, 0, 0]));
    let mut op = DiffOp::single(t2, DerivIndex::axis(0));
    for k in 1..4 {
        let mut e = [0u32; 4];
        e[0] = 1;
        e[k] = 1;
        op = op.add(&DiffOp::single(
            CoordPolynomial::monomial(CoordMonomial(e)),
            DerivIndex::axis(k),
        ));
    }
    op = op.add(&DiffOp::from_polynomial(CoordPolynomial::term(
        ParamScalar::from_ratio(3, 2),
        CoordMonomial::var(0),
    )));
    op = op.scale(&i_scalar().neg());
    let m_over_2hbar = ParamScalar::term(
        GaussianRational::from_ratio(-1, 2),
        ParamMonomial::from_pairs(&[(Param::Mass, 1), (Param::Hbar, -1)]),
    );
    let mut r2 = CoordPolynomial::zero();
    for k in 1..4 {
        let mut e = [0u32; 4];
        e[k] = 2;
        r2 = r2.add(&CoordPolynomial::monomial(CoordMonomial(e)));
    }
    op.add(&DiffOp::from_polynomial(r2.scale(&m_over_2hbar)))
}

/// The thirteen first-order symmetry generators of the free Schrodinger
/// operator, in a fixed order.
pub fn schrodinger_group_generators() -> Vec<(String, DiffOp)> {
    let mut out = Vec::with_capacity(13);
    out.push(("p0".to_string(), energy()));
    for k in 1..4 {
        out.push((format!("p{k}"), momentum(k)));
    }
    for k in 1..4 {
        out.push((format!("j{k}"), rotation(k)));
    }
    for k in 1..4 {
        out.push((format!("h{k}"), galilei_boost(k)));
    }
    out.push(("mass".to_string(), central_mass()));
    out.push(("dilation".to_string(), dilation()));
    out.push(("conformal".to_string(), conformal()));
    out
}

/// Quadratic field 2t^2 d_t + t x^k d_k generating the special conformal
/// reparametrization of time.
pub fn quadratic_conformal() -> DiffOp {
    let mut op = DiffOp::single(
        CoordPolynomial::term(ParamScalar::from_int(2), CoordMonomial([2, 0, 0, 0])),
        DerivIndex::axis(0),
    );
    for k in 1..4 {
        let mut e = [0u32; 4];
        e[0] = 1;
        e[k] = 1;
        op = op.add(&DiffOp::single(
            CoordPolynomial::monomial(CoordMonomial(e)),
            DerivIndex::axis(k),
        ));
    }
    op
}

/// Quadratic field t(x^j d_k - x^k d_j) generating time-dependent
/// rotations in the (j, k) plane.
pub fn time_rotation(j: usize, k: usize) -> DiffOp {
    assert!(j != k && (1..=3).contains(&j) && (1..=3).contains(&k));
    let term = |a: usize, b: usize| {
        let mut e = [0u32; 4];
        e[0] = 1;
        e[a] += 1;
        DiffOp::single(CoordPolynomial::monomial(CoordMonomial(e)), DerivIndex::axis(b))
    };
    term(j, k).sub(&term(k, j))
}

/// Resolve a generator by its catalog name.
pub fn by_name(name: &str) -> Option<DiffOp> {
    match name {
        "schrodinger" => return Some(schrodinger()),
        "schrodinger-rel" => return Some(schrodinger_relativistic()),
        "dalembert" => return Some(dalembert()),
        "laplacian" => return Some(laplacian()),
        "mass" => return Some(central_mass()),
        "dilation" => return Some(dilation()),
        "conformal" => return Some(conformal()),
        "q1" => return Some(quadratic_conformal()),
        _ => {}
    }
    let bytes = name.as_bytes();
    let axis = |b: u8| (b as char).to_digit(10).map(|d| d as usize);
    match bytes {
        [b'p', a] => axis(*a).filter(|&a| a < 4).map(translation),
        [b'g', a, b] => match (axis(*a), axis(*b)) {
            (Some(a), Some(b)) if a < 4 && b < 4 => Some(linear_field(a, b)),
            _ => None,
        },
        [b'j', k] => axis(*k).filter(|&k| (1..=3).contains(&k)).map(rotation),
        [b'h', k] => axis(*k)
            .filter(|&k| (1..=3).contains(&k))
            .map(galilei_boost),
        [b'm', b'0', k] => axis(*k)
            .filter(|&k| (1..=3).contains(&k))
            .map(lorentz_boost),
        [b'q', j, k] => match (axis(*j), axis(*k)) {
            (Some(j), Some(k)) if (1..=3).contains(&j) && (1..=3).contains(&k) && j != k => {
                Some(time_rotation(j, k))
            }
            _ => None,
        },
        _ => None,
    }
}
