//! Solvability of `a^p - a = x` in `F_q((t))`.
//!
//! The decision runs in three phases:
//!
//! 1. Negative exponents are cleared from the bottom up. A leading term
//!    `c t^v` with `p | v` is absorbed by `b = c^(1/p) t^(v/p)`, because
//!    `b^p - b = c t^v - b` and `v/p > v`. A leading exponent `v < 0` with
//!    `p ∤ v` is an obstruction: any `a` with `v(a) < 0` has
//!    `v(a^p - a) = p v(a)`.
//! 2. The constant term must have trace zero; the constant part of the
//!    witness comes from the residue field.
//! 3. What remains has positive valuation and is always solvable by
//!    `a = -(x + x^p + x^(p^2) + ...)`.
//!
//! Only coefficients at exponents `<= 0` influence the verdict.

use std::fmt;

use crate::error::{Error, Result};
use crate::finite_field::FqElement;
use crate::series::{Prec, Series, Valuation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Obstruction {
    /// The reduced remainder has valuation `exp < 0` with `p ∤ exp`.
    NonPDivisibleNegativeValuation(i64),
    /// The residue `c0` has nonzero trace to `F_p`.
    TraceObstruction(FqElement),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ASOutcome {
    Solvable(Series),
    Unsolvable(Obstruction),
    /// Coefficients up to exponent 0 are not all known; `needed_prec` would settle it.
    Indeterminate(i64),
}

/// Verdict without a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ASVerdict {
    Solvable,
    Unsolvable(Obstruction),
    Indeterminate(i64),
}

impl ASOutcome {
    pub fn is_solvable(&self) -> bool {
        matches!(self, ASOutcome::Solvable(_))
    }

    pub fn witness(&self) -> Option<&Series> {
        match self {
            ASOutcome::Solvable(w) => Some(w),
            _ => None,
        }
    }
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstruction::NonPDivisibleNegativeValuation(v) => {
                write!(f, "NonPDivisibleNegativeValuation({v})")
            }
            Obstruction::TraceObstruction(c) => write!(f, "TraceObstruction({c})"),
        }
    }
}

impl fmt::Display for ASOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ASOutcome::Solvable(w) => write!(f, "Solvable({w})"),
            ASOutcome::Unsolvable(o) => write!(f, "Unsolvable({o})"),
            ASOutcome::Indeterminate(p) => write!(f, "Indeterminate({p})"),
        }
    }
}

enum Reduction {
    /// `witness^p - witness = x - remainder`, `witness` exact, `v(remainder) > 0`.
    Done { witness: Series, remainder: Series },
    Unsolvable(Obstruction),
    Indeterminate(i64),
}

fn reduce(x: &Series) -> Reduction {
    let field = x.field().clone();
    let p = field.characteristic() as i64;
    let mut rem = x.clone();
    let mut witness = Vec::new();
    loop {
        match rem.vt() {
            Valuation::Finite(v) if v < 0 => {
                if v % p != 0 {
                    return Reduction::Unsolvable(Obstruction::NonPDivisibleNegativeValuation(v));
                }
                let c = rem.coeff_raw(v);
                let root = field.frobenius_inv(c);
                witness.push((v / p, root));
                // rem - (b^p - b) = rem - c t^v + b
                let step = Series::from_raw(&field, [(v, c), (v / p, field.neg(root))], Prec::Infinite);
                rem = rem.sub(&step).expect("same field");
            }
            Valuation::Finite(_) => break,
            Valuation::AtLeast(b) => {
                if b > 0 {
                    break;
                }
                return Reduction::Indeterminate(1);
            }
        }
    }
    if rem.prec() <= 0 {
        return Reduction::Indeterminate(1);
    }
    let c0 = rem.coeff_raw(0);
    let Some(e) = field.as_const_solve(c0) else {
        return Reduction::Unsolvable(Obstruction::TraceObstruction(FqElement::from_raw(&field, c0)));
    };
    witness.push((0, e));
    let rem = rem
        .sub(&Series::from_raw(&field, [(0, c0)], Prec::Infinite))
        .expect("same field");
    Reduction::Done {
        witness: Series::from_raw(&field, witness, Prec::Infinite),
        remainder: rem,
    }
}

/// Decides whether `a^p - a = x` has a solution, without building one.
pub fn as_decide(x: &Series) -> ASVerdict {
    match reduce(x) {
        Reduction::Done { .. } => ASVerdict::Solvable,
        Reduction::Unsolvable(o) => ASVerdict::Unsolvable(o),
        Reduction::Indeterminate(p) => ASVerdict::Indeterminate(p),
    }
}

/// Solves `a^p - a = x`, returning the canonical witness known below `witness_prec`.
///
/// The witness has no constant term beyond the canonical residue solution;
/// every other solution differs from it by an element of `F_p`. When the
/// positive part of `x` vanishes exactly the witness is exact.
pub fn as_solve(x: &Series, witness_prec: i64) -> Result<ASOutcome> {
    let (witness, remainder) = match reduce(x) {
        Reduction::Done { witness, remainder } => (witness, remainder),
        Reduction::Unsolvable(o) => return Ok(ASOutcome::Unsolvable(o)),
        Reduction::Indeterminate(p) => return Ok(ASOutcome::Indeterminate(p)),
    };
    if remainder.is_exact() && remainder.is_zero_known() {
        return Ok(ASOutcome::Solvable(witness));
    }
    if remainder.prec() < witness_prec {
        return Err(Error::PrecisionExceeded {
            needed: Prec::Finite(witness_prec),
            available: remainder.prec(),
        });
    }
    let cut = Prec::Finite(witness_prec);
    let mut tail = Series::zero(x.field()).truncate(cut);
    let mut power = remainder.truncate(cut);
    // v(power) > 0 and multiplies by p each round, so this terminates.
    while !power.is_zero_known() {
        tail = tail.sub(&power)?;
        power = power.frobenius().truncate(cut);
    }
    Ok(ASOutcome::Solvable(witness.add(&tail)?))
}

/// Largest bound at which `w^p - w = x` can be checked.
pub fn verifiable_bound(w: &Series, x: &Series) -> Prec {
    let lhs_prec = w.prec().scale(w.field().characteristic() as i64).min(w.prec());
    lhs_prec.min(x.prec())
}

/// Whether `w^p - w` and `x` agree at every exponent below `bound`.
pub fn as_verify(w: &Series, x: &Series, bound: i64) -> Result<bool> {
    let lhs = w.frobenius().sub(w)?;
    lhs.eq_upto(x, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::{parse_field, Field};

    fn f(text: &str) -> Field {
        parse_field(text).unwrap()
    }

    fn s(text: &str, field: &Field) -> Series {
        Series::parse(text, field).unwrap()
    }

    #[test]
    fn negative_non_divisible_exponent_obstructs() {
        let f3 = f("3");
        assert_eq!(
            as_solve(&s("t^-1", &f3), 10).unwrap(),
            ASOutcome::Unsolvable(Obstruction::NonPDivisibleNegativeValuation(-1))
        );
    }

    #[test]
    fn constant_one_has_trace_obstruction() {
        let f3 = f("3");
        assert_eq!(
            as_solve(&s("1", &f3), 10).unwrap(),
            ASOutcome::Unsolvable(Obstruction::TraceObstruction(FqElement::one(&f3)))
        );
    }

    #[test]
    fn telescoping_witness_for_t() {
        let f3 = f("3");
        let x = s("t^-18 - t^-2", &f3);
        let out = as_solve(&x, 10).unwrap();
        assert_eq!(out, ASOutcome::Solvable(s("t^-6 + t^-2", &f3)));
        let w = out.witness().unwrap();
        assert!(as_verify(w, &x, 1000).unwrap());
    }

    #[test]
    fn positive_tail() {
        let f2 = f("2");
        let x = s("t", &f2);
        let w = as_solve(&x, 20).unwrap().witness().cloned().unwrap();
        assert_eq!(w, s("t + t^2 + t^4 + t^8 + t^16 + O(t^20)", &f2));
        assert_eq!(verifiable_bound(&w, &x), Prec::Finite(20));
        assert!(as_verify(&w, &x, 20).unwrap());
    }

    #[test]
    fn truncated_inputs() {
        let f3 = f("3");
        assert_eq!(as_solve(&s("t^-3 + O(t^-1)", &f3), 5).unwrap(), ASOutcome::Indeterminate(1));
        // An obstruction inside the known window is definitive.
        assert_eq!(
            as_decide(&s("t^-5 + O(t^-2)", &f3)),
            ASVerdict::Unsolvable(Obstruction::NonPDivisibleNegativeValuation(-5))
        );
        assert!(matches!(
            as_solve(&s("t + O(t^4)", &f3), 10),
            Err(Error::PrecisionExceeded { .. })
        ));
        assert!(as_solve(&s("t + O(t^4)", &f3), 4).unwrap().is_solvable());
    }

    #[test]
    fn extension_field_residue() {
        let f4 = f("4");
        let out = as_solve(&s("1 + t^-2 + t^-4", &f4), 8).unwrap();
        let w = out.witness().unwrap();
        assert!(as_verify(w, &s("1 + t^-2 + t^-4", &f4), 8).unwrap());
        assert_eq!(w.coeff(0).unwrap(), FqElement::parse("g", &f4).unwrap());
    }

    #[test]
    fn verify_trivial_cases() {
        let f3 = f("3");
        let zero = Series::zero(&f3);
        assert!(as_verify(&zero, &zero, 100).unwrap());
        assert!(as_verify(&s("t^-2", &f3), &s("t^-6 - t^-2", &f3), 1000).unwrap());
    }
}
