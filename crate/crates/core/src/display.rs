//! Canonical text rendering. The output of every printer here reparses to
//! a structurally equal value through the expression grammar, so printing
//! followed by parsing is a fixed point.

use crate::coord::{CoordMonomial, CoordPolynomial, COORD_NAMES};
use crate::diffop::{DerivIndex, DiffOp};
use crate::param::{ParamMonomial, ParamScalar};
use crate::scalar::GaussianRational;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// One flattened summand: Gaussian coefficient, parameter monomial,
/// coordinate monomial, derivative index. Returns the extracted sign and
/// the unsigned factor string.
fn term_string(
    c: &GaussianRational,
    pm: &ParamMonomial,
    cm: &CoordMonomial,
    dm: &DerivIndex,
) -> (bool, String) {
    let mut factors: Vec<String> = Vec::new();
    let mut negative = false;

    if !c.re.is_zero() && !c.im.is_zero() {
        // Mixed complex coefficient: keep it grouped, sign stays inside.
        let re_s = rational_to_string(&c.re);
        let im_mag = c.im.abs();
        let im_s = if im_mag.is_one() {
            "i".to_string()
        } else {
            format!("{}*i", rational_to_string(&im_mag))
        };
        let sign = if c.im.is_negative() { "-" } else { "+" };
        factors.push(format!("({re_s}{sign}{im_s})"));
    } else if !c.im.is_zero() {
        negative = c.im.is_negative();
        let mag = c.im.abs();
        if !mag.is_one() {
            factors.push(rational_to_string(&mag));
        }
        factors.push("i".to_string());
    } else {
        negative = c.re.is_negative();
        let mag = c.re.abs();
        if !mag.is_one() {
            factors.push(rational_to_string(&mag));
        }
    }

    for (p, e) in pm.iter() {
        if e == 1 {
            factors.push(p.name());
        } else {
            factors.push(format!("{}^{}", p.name(), e));
        }
    }
    for k in 0..4 {
        let e = cm.0[k];
        if e == 1 {
            factors.push(COORD_NAMES[k].to_string());
        } else if e > 1 {
            factors.push(format!("{}^{}", COORD_NAMES[k], e));
        }
    }
    if !dm.is_none() {
        let mut s = String::from("d_");
        for k in 0..4 {
            for _ in 0..dm.0[k] {
                s.push(COORD_NAMES[k]);
            }
        }
        factors.push(s);
    }
    if factors.is_empty() {
        factors.push("1".to_string());
    }
    (negative, factors.join("*"))
}

fn join_terms(terms: Vec<(bool, String)>) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (neg, s)) in terms.into_iter().enumerate() {
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&s);
    }
    out
}

pub fn scalar_to_string(s: &ParamScalar) -> String {
    join_terms(
        s.terms()
            .iter()
            .map(|(c, m)| term_string(c, m, &CoordMonomial::one(), &DerivIndex::none()))
            .collect(),
    )
}

pub fn polynomial_to_string(p: &CoordPolynomial) -> String {
    let mut terms = Vec::new();
    for (s, cm) in p.terms() {
        for (c, pm) in s.terms() {
            terms.push(term_string(c, pm, cm, &DerivIndex::none()));
        }
    }
    join_terms(terms)
}

pub fn diffop_to_string(op: &DiffOp) -> String {
    let mut terms = Vec::new();
    for (dm, p) in op.terms() {
        for (s, cm) in p.terms() {
            for (c, pm) in s.terms() {
                terms.push(term_string(c, pm, cm, dm));
            }
        }
    }
    join_terms(terms)
}
