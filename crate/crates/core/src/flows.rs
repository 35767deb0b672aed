//! One-parameter coordinate flows of solved generators: exact closed
//! forms for affine fields and the two special quadratic fields, plus a
//! fixed-step Runge-Kutta integrator that serves as an independent
//! numeric oracle for the closed forms.

use crate::diffop::DiffOp;
use crate::param::{ParamBinding, ParamError};
use std::f64::consts::LN_2;
use thiserror::Error;

/// Default integrator step as a fraction of the flow parameter.
pub const DEFAULT_STEP_FRACTION: f64 = 1e-3;

/// Imaginary parts below this threshold are treated as numeric noise when
/// binding symbolic coefficients to real vector fields.
const REAL_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum FlowError {
    #[error("flow is singular at the requested parameter")]
    SingularFlow,
    #[error("rotation needs two distinct spatial axes")]
    BadIndices,
    #[error("operator is not a first-order vector field without zero-order part")]
    NotVectorField,
    #[error("operator is not affine")]
    NotAffine,
    #[error("coefficient has a nonzero imaginary part after binding")]
    NonRealCoefficient,
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// Row-major 4x4 real matrix.
pub type Mat4 = [[f64; 4]; 4];

/// Vector field xi(x) = linear * x + translation, with no zero-order part.
#[derive(Clone, Copy, Debug, Default)]
pub struct AffineGenerator {
    pub linear: Mat4,
    pub translation: [f64; 4],
}

impl AffineGenerator {
    /// Extract the affine data of a first-order operator after binding its
    /// symbolic parameters. Rejects zero-order parts, higher derivatives,
    /// non-affine coefficients, and coefficients with imaginary parts.
    pub fn from_diffop(op: &DiffOp, binding: &ParamBinding) -> Result<Self, FlowError> {
        let mut linear = [[0.0; 4]; 4];
        let mut translation = [0.0; 4];
        for (d, poly) in op.terms() {
            if d.order() != 1 {
                return Err(FlowError::NotVectorField);
            }
            let axis = (0..4).find(|&k| d.0[k] == 1).unwrap();
            for (s, m) in poly.terms() {
                let v = s.eval(binding)?;
                if v.im.abs() > REAL_TOL {
                    return Err(FlowError::NonRealCoefficient);
                }
                match m.degree() {
                    0 => translation[axis] += v.re,
                    1 => {
                        let src = (0..4).find(|&k| m.0[k] == 1).unwrap();
                        linear[axis][src] += v.re;
                    }
                    _ => return Err(FlowError::NotAffine),
                }
            }
        }
        Ok(Self {
            linear,
            translation,
        })
    }
}

fn mat_mul<const N: usize>(a: &[[f64; N]; N], b: &[[f64; N]; N]) -> [[f64; N]; N] {
    let mut c = [[0.0; N]; N];
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..N {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

fn mat_identity<const N: usize>() -> [[f64; N]; N] {
    let mut m = [[0.0; N]; N];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn mat_is_zero<const N: usize>(a: &[[f64; N]; N]) -> bool {
    a.iter().all(|row| row.iter().all(|&v| v == 0.0))
}

fn mat_norm1<const N: usize>(a: &[[f64; N]; N]) -> f64 {
    (0..N)
        .map(|j| (0..N).map(|i| a[i][j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential. Nilpotent matrices get the exact finite series;
/// everything else goes through scaling-and-squaring with a Taylor sum at
/// scaled norm <= 1/2.
fn expm<const N: usize>(a: &[[f64; N]; N]) -> [[f64; N]; N] {
    // Nilpotency test: some power up to N vanishes exactly.
    let mut powers: Vec<[[f64; N]; N]> = vec![mat_identity(), *a];
    let mut nilpotent_at = None;
    for k in 2..=N {
        let next = mat_mul(powers.last().unwrap(), a);
        if mat_is_zero(&next) {
            nilpotent_at = Some(k);
            powers.push(next);
            break;
        }
        powers.push(next);
    }
    if mat_is_zero(a) {
        return mat_identity();
    }
    if let Some(k) = nilpotent_at {
        let mut sum = mat_identity::<N>();
        let mut fact = 1.0;
        for (j, p) in powers.iter().enumerate().take(k).skip(1) {
            fact *= j as f64;
            for i in 0..N {
                for l in 0..N {
                    sum[i][l] += p[i][l] / fact;
                }
            }
        }
        return sum;
    }
    let norm = mat_norm1(a);
    let s = if norm > 0.5 {
        ((norm / 0.5).ln() / LN_2).ceil() as u32
    } else {
        0
    };
    let scale = 0.5f64.powi(s as i32);
    let mut b = *a;
    for row in b.iter_mut() {
        for v in row.iter_mut() {
            *v *= scale;
        }
    }
    let mut sum = mat_identity::<N>();
    let mut term = mat_identity::<N>();
    for j in 1..=13u32 {
        term = mat_mul(&term, &b);
        let f = 1.0 / (1..=j).map(|v| v as f64).product::<f64>();
        for i in 0..N {
            for l in 0..N {
                sum[i][l] += term[i][l] * f;
            }
        }
    }
    for _ in 0..s {
        sum = mat_mul(&sum, &sum);
    }
    sum
}

/// Exact/numeric flow of an affine field: x' = exp(theta A) x + T(theta) a
/// with T(theta) the integrated exponential series, computed through the
/// homogeneous 5x5 embedding [[A, a], [0, 0]].
pub fn flow_affine(gen: &AffineGenerator, theta: f64, x: [f64; 4]) -> [f64; 4] {
    let mut h = [[0.0; 5]; 5];
    for i in 0..4 {
        for j in 0..4 {
            h[i][j] = theta * gen.linear[i][j];
        }
        h[i][4] = theta * gen.translation[i];
    }
    let e = expm(&h);
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = e[i][4];
        for j in 0..4 {
            out[i] += e[i][j] * x[j];
        }
    }
    out
}

/// Closed-form flow of the quadratic field 2t^2 d_t + t x^k d_k:
/// t' = t/(1 - 2 theta t), spatial components scale by (1 - 2 theta t)^(-1/2).
/// Defined while 1 - 2 theta t > 0.
pub fn flow_q1(theta: f64, x: [f64; 4]) -> Result<[f64; 4], FlowError> {
    let denom = 1.0 - 2.0 * theta * x[0];
    if denom <= 0.0 {
        return Err(FlowError::SingularFlow);
    }
    let root = denom.sqrt();
    Ok([x[0] / denom, x[1] / root, x[2] / root, x[3] / root])
}

/// Closed-form flow of t(x^j d_k - x^k d_j): rotation of the (j, k) plane
/// by the time-dependent angle theta * t; t and the third spatial
/// coordinate are fixed.
pub fn flow_rotation(theta: f64, j: usize, k: usize, x: [f64; 4]) -> Result<[f64; 4], FlowError> {
    if j == k || !(1..=3).contains(&j) || !(1..=3).contains(&k) {
        return Err(FlowError::BadIndices);
    }
    let angle = theta * x[0];
    let (sin, cos) = angle.sin_cos();
    let mut out = x;
    out[j] = x[j] * cos - x[k] * sin;
    out[k] = x[j] * sin + x[k] * cos;
    Ok(out)
}

/// Polynomial vector field with numeric coefficients, ready for
/// integration.
#[derive(Clone, Debug, Default)]
pub struct NumericVectorField {
    components: [Vec<(f64, [u32; 4])>; 4],
}

impl NumericVectorField {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Bind a first-order, zero-order-free operator to a real polynomial
    /// vector field.
    pub fn from_diffop(op: &DiffOp, binding: &ParamBinding) -> Result<Self, FlowError> {
        let mut components: [Vec<(f64, [u32; 4])>; 4] = Default::default();
        for (d, poly) in op.terms() {
            if d.order() != 1 {
                return Err(FlowError::NotVectorField);
            }
            let axis = (0..4).find(|&k| d.0[k] == 1).unwrap();
            for (s, m) in poly.terms() {
                let v = s.eval(binding)?;
                if v.im.abs() > REAL_TOL {
                    return Err(FlowError::NonRealCoefficient);
                }
                components[axis].push((v.re, m.0));
            }
        }
        Ok(Self { components })
    }

    pub fn eval(&self, x: &[f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (axis, terms) in self.components.iter().enumerate() {
            for (c, e) in terms {
                let mut v = *c;
                for k in 0..4 {
                    v *= x[k].powi(e[k] as i32);
                }
                out[axis] += v;
            }
        }
        out
    }
}

/// Fixed-step classical Runge-Kutta configuration.
#[derive(Clone, Copy, Debug)]
pub struct NumericIntegratorConfig {
    pub step: f64,
}

impl NumericIntegratorConfig {
    pub fn new(step: f64) -> Self {
        assert!(step > 0.0, "step must be positive");
        Self { step }
    }

    /// Default step 1e-3 * |theta|.
    pub fn default_for(theta: f64) -> Self {
        let h = (theta.abs() * DEFAULT_STEP_FRACTION).max(f64::MIN_POSITIVE);
        Self { step: h }
    }
}

/// Endpoint of the RK4 trajectory dx/dtheta = field(x) after parameter
/// theta. At least ten steps are always taken so the configured step
/// never exceeds theta/10.
pub fn integrate_numeric(
    field: &NumericVectorField,
    x: [f64; 4],
    theta: f64,
    cfg: &NumericIntegratorConfig,
) -> [f64; 4] {
    if theta == 0.0 {
        return x;
    }
    let n = ((theta.abs() / cfg.step).ceil() as usize).max(10);
    let h = theta / n as f64;
    let mut y = x;
    for _ in 0..n {
        let k1 = field.eval(&y);
        let k2 = field.eval(&offset(&y, &k1, h / 2.0));
        let k3 = field.eval(&offset(&y, &k2, h / 2.0));
        let k4 = field.eval(&offset(&y, &k3, h));
        for i in 0..4 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y
}

fn offset(x: &[f64; 4], k: &[f64; 4], h: f64) -> [f64; 4] {
    let mut out = *x;
    for i in 0..4 {
        out[i] += h * k[i];
    }
    out
}

/// One-parameter coordinate transformation for a generator.
#[derive(Clone, Debug)]
pub enum FlowMap {
    Affine { gen: AffineGenerator, theta: f64 },
    TimeConformal { theta: f64 },
    TimeRotation { j: usize, k: usize, theta: f64 },
    Numeric {
        field: NumericVectorField,
        theta: f64,
        cfg: NumericIntegratorConfig,
    },
}

impl FlowMap {
    pub fn theta(&self) -> f64 {
        match self {
            FlowMap::Affine { theta, .. }
            | FlowMap::TimeConformal { theta }
            | FlowMap::TimeRotation { theta, .. }
            | FlowMap::Numeric { theta, .. } => *theta,
        }
    }

    pub fn apply(&self, x: [f64; 4]) -> Result<[f64; 4], FlowError> {
        match self {
            FlowMap::Affine { gen, theta } => Ok(flow_affine(gen, *theta, x)),
            FlowMap::TimeConformal { theta } => flow_q1(*theta, x),
            FlowMap::TimeRotation { j, k, theta } => flow_rotation(*theta, *j, *k, x),
            FlowMap::Numeric { field, theta, cfg } => {
                Ok(integrate_numeric(field, x, *theta, cfg))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::param::ParamBinding;

    fn assert_close(a: &[f64; 4], b: &[f64; 4], tol: f64) {
        for i in 0..4 {
            assert!(
                (a[i] - b[i]).abs() <= tol,
                "component {i}: {} vs {} (tol {tol})",
                a[i],
                b[i]
            );
        }
    }

    #[test]
    fn q1_closed_form_values() {
        // theta = 0.1 at (1, 1, 0, 0): t' = 1/0.8 = 1.25, x' = 1/sqrt(0.8).
        let got = flow_q1(0.1, [1.0, 1.0, 0.0, 0.0]).unwrap();
        assert_close(&got, &[1.25, 1.0 / 0.8f64.sqrt(), 0.0, 0.0], 1e-15);
        assert_eq!(flow_q1(0.0, [1.0, 2.0, 3.0, 4.0]).unwrap(), [1.0, 2.0, 3.0, 4.0]);
        assert_eq!(
            flow_q1(0.5, [1.0, 0.0, 0.0, 0.0]),
            Err(FlowError::SingularFlow)
        );
    }

    #[test]
    fn rotation_quarter_turn() {
        // angle theta*t = pi/2 sends (x, y) = (1, 0) to (0, 1).
        let got = flow_rotation(std::f64::consts::FRAC_PI_2, 1, 2, [1.0, 1.0, 0.0, 0.5]).unwrap();
        assert_close(&got, &[1.0, 0.0, 1.0, 0.5], 1e-15);
        assert_eq!(
            flow_rotation(0.3, 1, 1, [0.0; 4]),
            Err(FlowError::BadIndices)
        );
        // Radius in the rotation plane is preserved.
        let x = [0.7, 0.3, -1.2, 0.9];
        let moved = flow_rotation(0.77, 2, 3, x).unwrap();
        let r0 = x[2] * x[2] + x[3] * x[3];
        let r1 = moved[2] * moved[2] + moved[3] * moved[3];
        assert!((r0 - r1).abs() < 1e-12);
        assert_eq!(moved[0], x[0]);
    }

    #[test]
    fn shear_flow_is_galilei_companion() {
        // G_{0x} = t d_x flows to x' = x + theta t, a pure shear.
        let binding = ParamBinding::natural_units();
        let gen = AffineGenerator::from_diffop(&catalog::linear_field(0, 1), &binding).unwrap();
        let got = flow_affine(&gen, 0.25, [2.0, 1.0, 0.0, 0.0]);
        assert_close(&got, &[2.0, 1.5, 0.0, 0.0], 0.0);
    }

    #[test]
    fn translation_flow() {
        let binding = ParamBinding::natural_units();
        let gen = AffineGenerator::from_diffop(&catalog::translation(1), &binding).unwrap();
        let got = flow_affine(&gen, 0.75, [0.0, 1.0, 2.0, 3.0]);
        assert_close(&got, &[0.0, 1.75, 2.0, 3.0], 0.0);
    }

    #[test]
    fn diagonal_flow_matches_rk4() {
        // Linearization of the quadratic time field at small t:
        // A = diag(2, 1, 1, 1), not nilpotent.
        let gen = AffineGenerator {
            linear: [
                [2.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ],
            translation: [0.0; 4],
        };
        let x = [0.3, -0.7, 0.2, 1.1];
        let theta = 0.4;
        let closed = flow_affine(&gen, theta, x);
        // Against exact exponentials of the diagonal.
        let expect = [
            x[0] * (2.0 * theta).exp(),
            x[1] * theta.exp(),
            x[2] * theta.exp(),
            x[3] * theta.exp(),
        ];
        assert_close(&closed, &expect, 1e-12);
        // And against the numeric oracle.
        let field = NumericVectorField {
            components: [
                vec![(2.0, [1, 0, 0, 0])],
                vec![(1.0, [0, 1, 0, 0])],
                vec![(1.0, [0, 0, 1, 0])],
                vec![(1.0, [0, 0, 0, 1])],
            ],
        };
        let rk4 = integrate_numeric(&field, x, theta, &NumericIntegratorConfig::new(1e-3));
        assert_close(&closed, &rk4, 1e-10);
    }

    #[test]
    fn q1_field_matches_closed_form() {
        let binding = ParamBinding::natural_units();
        let field =
            NumericVectorField::from_diffop(&catalog::quadratic_conformal(), &binding).unwrap();
        let x = [1.0, 1.0, 0.0, 0.0];
        let rk4 = integrate_numeric(&field, x, 0.1, &NumericIntegratorConfig::new(1e-3));
        let closed = flow_q1(0.1, x).unwrap();
        assert_close(&rk4, &closed, 1e-9);
    }

    #[test]
    fn rotation_field_matches_closed_form() {
        let binding = ParamBinding::natural_units();
        let field =
            NumericVectorField::from_diffop(&catalog::time_rotation(1, 2), &binding).unwrap();
        let x = [0.8, 1.0, -0.5, 0.3];
        let theta = 0.3;
        let rk4 = integrate_numeric(&field, x, theta, &NumericIntegratorConfig::new(1e-4));
        let closed = flow_rotation(theta, 1, 2, x).unwrap();
        assert_close(&rk4, &closed, 1e-9);
    }

    #[test]
    fn zero_field_is_identity() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let got = integrate_numeric(
            &NumericVectorField::zero(),
            x,
            0.7,
            &NumericIntegratorConfig::new(1e-2),
        );
        assert_eq!(got, x);
    }

    #[test]
    fn eta_bearing_operator_rejected() {
        let binding = ParamBinding::natural_units();
        assert_eq!(
            AffineGenerator::from_diffop(&catalog::galilei_boost(1), &binding).unwrap_err(),
            FlowError::NotVectorField
        );
    }
}
