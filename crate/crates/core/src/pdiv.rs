//! Coding of p-divisibility by Artin–Schreier solvability.
//!
//! For `alpha` of positive valuation and a suitable multiplier `N`,
//!
//! ```text
//! n |_p m   <=>   m >= n  and  a^p - a = alpha^(-mN) - alpha^(-nN) has a solution,
//! ```
//!
//! where `n |_p m` means `m = n p^k` for some `k >= 0`. `N = 1` works when
//! `alpha = beta^(p^k)` with `p ∤ v_t(beta)`. When `p | v_t(beta) = C`,
//! `N` must exceed `D/C + 1` with `D = v̂_t(beta^-1)` and be prime to `p`.

use std::fmt;

use serde::Serialize;

use crate::artin_schreier::{as_decide, ASVerdict};
use crate::error::{Error, Result};
use crate::finite_field::Field;
use crate::series::{Prec, PthRoot, Series, Valuation};

/// Hard cap on working precision (relative terms) under auto-escalation.
pub const PRECISION_CAP: i64 = 1 << 20;

/// Relative precision of the first attempt when expanding `beta^-1` for `D`.
const INITIAL_EXPANSION: i64 = 64;

/// `n |_p m`: `m / n` is a nonnegative power of `p`.
pub fn pdiv_oracle(p: u64, n: u64, m: u64) -> Result<bool> {
    if n == 0 || m == 0 {
        return Err(Error::domain("p-divisibility is defined for positive integers"));
    }
    if !crate::finite_field::is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if m % n != 0 {
        return Ok(false);
    }
    let mut quotient = m / n;
    while quotient % p == 0 {
        quotient /= p;
    }
    Ok(quotient == 1)
}

/// An element of positive valuation given by an exact Laurent polynomial,
/// either directly or through its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Alpha {
    Direct(Series),
    Inverse(Series),
}

impl Alpha {
    /// `alpha` itself is the given exact Laurent polynomial.
    pub fn direct(alpha: Series) -> Result<Alpha> {
        check_exact(&alpha)?;
        match alpha.vt() {
            Valuation::Finite(v) if v > 0 => Ok(Alpha::Direct(alpha)),
            _ => Err(Error::domain("alpha must have positive valuation")),
        }
    }

    /// `alpha^-1` is the given exact Laurent polynomial.
    pub fn from_inverse(alpha_inv: Series) -> Result<Alpha> {
        check_exact(&alpha_inv)?;
        match alpha_inv.vt() {
            Valuation::Finite(v) if v < 0 => Ok(Alpha::Inverse(alpha_inv)),
            _ => Err(Error::domain("alpha^-1 must have negative valuation")),
        }
    }

    pub fn field(&self) -> &Field {
        self.presented().field()
    }

    /// The exact Laurent polynomial this element is presented by.
    pub fn presented(&self) -> &Series {
        match self {
            Alpha::Direct(s) | Alpha::Inverse(s) => s,
        }
    }

    /// `v_t(alpha) > 0`.
    pub fn valuation(&self) -> i64 {
        let v = self.presented().vt().finite().expect("validated at construction");
        match self {
            Alpha::Direct(_) => v,
            Alpha::Inverse(_) => -v,
        }
    }

    /// `alpha^e` known below `target`.
    pub fn pow(&self, e: i64, target: Prec) -> Result<Series> {
        match self {
            Alpha::Direct(s) => s.int_pow(e, target),
            Alpha::Inverse(s) => s.int_pow(-e, target),
        }
    }

    /// `alpha^(p^k)`.
    pub fn frobenius_power(&self, k: u32) -> Alpha {
        let mut s = self.presented().clone();
        for _ in 0..k {
            s = s.frobenius();
        }
        match self {
            Alpha::Direct(_) => Alpha::Direct(s),
            Alpha::Inverse(_) => Alpha::Inverse(s),
        }
    }

    /// The p-th root, when `alpha` is a p-th power.
    pub fn pth_root(&self) -> Option<Alpha> {
        match self.presented().pth_root() {
            PthRoot::Root(r) => Some(match self {
                Alpha::Direct(_) => Alpha::Direct(r),
                Alpha::Inverse(_) => Alpha::Inverse(r),
            }),
            PthRoot::NotAPthPower => None,
            PthRoot::IndeterminateAtPrecision => unreachable!("presentations are exact"),
        }
    }

    /// `alpha^e` lies in `F_q[[t]] \ {1}`; with `v_t(alpha) > 0` this
    /// selects exactly the positive exponents.
    pub fn is_positive_power(&self, e: i64) -> bool {
        e.checked_mul(self.valuation()).is_some_and(|v| v >= 0) && e != 0
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Direct(s) => write!(f, "alpha = {s}"),
            Alpha::Inverse(s) => write!(f, "alpha^-1 = {s}"),
        }
    }
}

fn check_exact(s: &Series) -> Result<()> {
    if s.is_exact() {
        Ok(())
    } else {
        Err(Error::domain("alpha must be given by an exact Laurent polynomial"))
    }
}

/// Writes `alpha = beta^(p^k)` with `beta` not a p-th power and `k` maximal.
pub fn normalize_pth_power(alpha: &Alpha) -> (Alpha, u32) {
    let mut beta = alpha.clone();
    let mut k = 0;
    while let Some(root) = beta.pth_root() {
        beta = root;
        k += 1;
    }
    (beta, k)
}

/// Everything the coding needs: `alpha = beta^(p^k)`, `C = v_t(beta)`,
/// `D = v̂_t(beta^-1)` (only when `p | C`), and the multiplier `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodingParams {
    pub alpha: Alpha,
    pub beta: Alpha,
    pub k: u32,
    pub beta_valuation: i64,
    pub beta_inv_vhat: Option<i64>,
    pub multiplier: u64,
}

/// Serializable summary, `{"C": 3, "D": 1, "k": 0, "N": 2}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodingSummary {
    #[serde(rename = "C")]
    pub c: i64,
    #[serde(rename = "D")]
    pub d: Option<i64>,
    pub k: u32,
    #[serde(rename = "N")]
    pub n: u64,
}

impl CodingParams {
    /// Replaces `N`, e.g. to exhibit what goes wrong with `N = 1`.
    pub fn with_multiplier(mut self, multiplier: u64) -> Result<Self> {
        if multiplier == 0 {
            return Err(Error::domain("N must be positive"));
        }
        self.multiplier = multiplier;
        Ok(self)
    }

    pub fn summary(&self) -> CodingSummary {
        CodingSummary {
            c: self.beta_valuation,
            d: self.beta_inv_vhat,
            k: self.k,
            n: self.multiplier,
        }
    }
}

impl fmt::Display for CodingSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.d {
            Some(d) => write!(f, "{{C: {}, D: {d}, k: {}, N: {}}}", self.c, self.k, self.n),
            None => write!(f, "{{C: {}, D: none, k: {}, N: {}}}", self.c, self.k, self.n),
        }
    }
}

/// `v̂_t(beta^-1)`, expanding the inverse until a non-p-divisible exponent shows up.
fn inverse_vhat(beta: &Alpha) -> Result<i64> {
    let c = beta.valuation();
    let mut rel = INITIAL_EXPANSION;
    loop {
        let inv = beta.pow(-1, Prec::Finite(rel - c))?;
        if let Valuation::Finite(d) = inv.vhat() {
            return Ok(d);
        }
        if inv.is_exact() {
            unreachable!("beta is not a p-th power, hence neither is its inverse");
        }
        rel *= 2;
        if rel > PRECISION_CAP {
            return Err(Error::PrecisionCap { cap: PRECISION_CAP });
        }
    }
}

/// Smallest `N` with `p ∤ N` and `N > D/C + 1`.
pub fn smallest_multiplier(p: u64, c: i64, d: i64) -> u64 {
    debug_assert!(c > 0);
    let (c, d, p) = (c as i128, d as i128, p as i128);
    let mut n: i128 = 1;
    loop {
        if n % p != 0 && n * c > d + c {
            return n as u64;
        }
        n += 1;
    }
}

/// Chooses `N` for `alpha`: 1 when `p ∤ v_t(beta)`, otherwise the smallest
/// admissible value above `D/C + 1`.
pub fn choose_n(alpha: &Alpha) -> Result<CodingParams> {
    let p = alpha.field().characteristic();
    let (beta, k) = normalize_pth_power(alpha);
    let c = beta.valuation();
    let (d, multiplier) = if c % p as i64 != 0 {
        (None, 1)
    } else {
        let d = inverse_vhat(&beta)?;
        (Some(d), smallest_multiplier(p, c, d))
    };
    Ok(CodingParams {
        alpha: alpha.clone(),
        beta,
        k,
        beta_valuation: c,
        beta_inv_vhat: d,
        multiplier,
    })
}

/// How much of each `alpha^-1` expansion to keep, in relative terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WorkingPrecision {
    /// Start at `2 m N v_t(alpha) + 64` and double on indeterminate reads.
    #[default]
    Auto,
    /// Use exactly this many terms; running short is an error.
    Fixed(i64),
}

/// `alpha^(-e)` minus `alpha^(-f)`, with `rel` relative terms of each power.
fn coding_difference(alpha: &Alpha, e: i64, f: i64, rel: i64) -> Result<Series> {
    let v = alpha.valuation();
    let pow = |e: i64| -> Result<Series> {
        let target = e
            .checked_mul(-v)
            .and_then(|x| x.checked_add(rel))
            .ok_or_else(|| Error::domain("exponent overflow"))?;
        alpha.pow(-e, Prec::Finite(target))
    };
    pow(e)?.sub(&pow(f)?)
}

/// The coded relation: `m >= n` and `alpha^(-mN) - alpha^(-nN)` lies in the
/// image of `a -> a^p - a`.
pub fn coding_check(params: &CodingParams, m: u64, n: u64, prec: WorkingPrecision) -> Result<bool> {
    if m == 0 || n == 0 {
        return Err(Error::domain("m and n must be positive"));
    }
    if m < n {
        return Ok(false);
    }
    let big = |x: u64| -> Result<i64> {
        x.checked_mul(params.multiplier)
            .and_then(|y| i64::try_from(y).ok())
            .ok_or_else(|| Error::domain("exponent overflow"))
    };
    let (em, en) = (big(m)?, big(n)?);
    let v = params.alpha.valuation();
    let mut rel = match prec {
        WorkingPrecision::Fixed(w) => w,
        WorkingPrecision::Auto => em
            .checked_mul(2 * v)
            .and_then(|x| x.checked_add(64))
            .ok_or_else(|| Error::domain("exponent overflow"))?,
    };
    loop {
        let x = coding_difference(&params.alpha, em, en, rel)?;
        match as_decide(&x) {
            ASVerdict::Solvable => return Ok(true),
            ASVerdict::Unsolvable(_) => return Ok(false),
            ASVerdict::Indeterminate(needed) => {
                if let WorkingPrecision::Fixed(_) = prec {
                    return Err(Error::PrecisionExceeded {
                        needed: Prec::Finite(needed),
                        available: x.prec(),
                    });
                }
                rel = rel.saturating_mul(2);
                if rel > PRECISION_CAP {
                    return Err(Error::PrecisionCap { cap: PRECISION_CAP });
                }
            }
        }
    }
}

/// Comparison of the coded relation with [`pdiv_oracle`] on `1 <= m, n <= bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub bound: u64,
    pub checked: u64,
    /// `(m, n, coding verdict, oracle verdict)`, sorted by `(m, n)`.
    pub mismatches: Vec<(u64, u64, bool, bool)>,
}

impl ScanReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

impl fmt::Display for ScanReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bound: {}", self.bound)?;
        writeln!(f, "checked: {}", self.checked)?;
        write!(f, "mismatches: {}", self.mismatches.len())?;
        for (m, n, coding, oracle) in &self.mismatches {
            write!(f, "\n  m={m} n={n} coding={coding} oracle={oracle}")?;
        }
        Ok(())
    }
}

pub fn coding_scan(params: &CodingParams, bound: u64, prec: WorkingPrecision) -> Result<ScanReport> {
    if bound == 0 {
        return Err(Error::domain("scan bound must be at least 1"));
    }
    let p = params.alpha.field().characteristic();
    let mut mismatches = Vec::new();
    for m in 1..=bound {
        for n in 1..=bound {
            let coding = coding_check(params, m, n, prec)?;
            let oracle = pdiv_oracle(p, n, m)?;
            if coding != oracle {
                mismatches.push((m, n, coding, oracle));
            }
        }
    }
    Ok(ScanReport {
        bound,
        checked: bound * bound,
        mismatches,
    })
}

/// `alpha^(-n p^(k-1)) + ... + alpha^(-n)`, which satisfies
/// `a^p - a = alpha^(-n p^k) - alpha^(-n)`; each power is known below `witness_prec`.
pub fn pdiv_witness(alpha: &Alpha, n: u64, k: u32, witness_prec: Prec) -> Result<Series> {
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    let p = alpha.field().characteristic();
    let mut sum = Series::zero(alpha.field());
    let mut e = n;
    for _ in 0..k {
        let exp = i64::try_from(e).map_err(|_| Error::domain("exponent overflow"))?;
        sum = sum.add(&alpha.pow(-exp, witness_prec)?)?;
        e = e
            .checked_mul(p)
            .ok_or_else(|| Error::domain("exponent overflow"))?;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::artin_schreier::as_verify;
    use crate::finite_field::parse_field;

    fn f(text: &str) -> Field {
        parse_field(text).unwrap()
    }

    fn s(text: &str, field: &Field) -> Series {
        Series::parse(text, field).unwrap()
    }

    fn example_alpha() -> Alpha {
        Alpha::from_inverse(s("t^-3 + 1 + t + t^2", &f("3"))).unwrap()
    }

    #[test]
    fn oracle_examples() {
        assert!(pdiv_oracle(3, 2, 18).unwrap());
        assert!(!pdiv_oracle(3, 1, 2).unwrap());
        assert!(pdiv_oracle(5, 7, 7).unwrap());
        assert!(!pdiv_oracle(2, 3, 9).unwrap());
        assert!(matches!(pdiv_oracle(3, 0, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn witness_for_t() {
        let f3 = f("3");
        let alpha = Alpha::direct(s("t", &f3)).unwrap();
        let w = pdiv_witness(&alpha, 2, 2, Prec::Infinite).unwrap();
        assert_eq!(w, s("t^-6 + t^-2", &f3));
        assert_eq!(pdiv_witness(&alpha, 2, 0, Prec::Infinite).unwrap(), Series::zero(&f3));
    }

    #[test]
    fn witness_for_example_alpha() {
        let alpha = example_alpha();
        let w = pdiv_witness(&alpha, 1, 1, Prec::Infinite).unwrap();
        assert_eq!(&w, alpha.presented());
        let x = alpha
            .pow(-3, Prec::Infinite)
            .unwrap()
            .sub(&alpha.pow(-1, Prec::Infinite).unwrap())
            .unwrap();
        assert!(as_verify(&w, &x, 1000).unwrap());
    }

    #[test]
    fn normalization() {
        let f3 = f("3");
        let (beta, k) = normalize_pth_power(&Alpha::direct(s("t^9", &f3)).unwrap());
        assert_eq!((beta, k), (Alpha::direct(s("t", &f3)).unwrap(), 2));
        let (beta, k) = normalize_pth_power(&example_alpha());
        assert_eq!((beta, k), (example_alpha(), 0));
        let cubed = Alpha::from_inverse(s("t^-3 + 1 + t + t^2", &f3).int_pow(3, Prec::Infinite).unwrap()).unwrap();
        assert_eq!(normalize_pth_power(&cubed), (example_alpha(), 1));
    }

    #[test]
    fn choose_n_examples() {
        let f3 = f("3");
        let params = choose_n(&Alpha::direct(s("t", &f3)).unwrap()).unwrap();
        assert_eq!(params.multiplier, 1);
        assert_eq!(params.beta_inv_vhat, None);

        let params = choose_n(&example_alpha()).unwrap();
        assert_eq!(params.summary(), CodingSummary { c: 3, d: Some(1), k: 0, n: 2 });
        assert_eq!(params.summary().to_string(), "{C: 3, D: 1, k: 0, N: 2}");

        let f2 = f("2");
        let params = choose_n(&Alpha::direct(s("t^3 + t^4", &f2)).unwrap()).unwrap();
        assert_eq!(params.multiplier, 1);
    }

    #[test]
    fn direct_presentation_expands_inverse_for_d() {
        let f3 = f("3");
        // v̂_t(beta^-1) = v̂_t(beta) - 2 v_t(beta) = 4 - 6
        let params = choose_n(&Alpha::direct(s("t^3 + t^4", &f3)).unwrap()).unwrap();
        assert_eq!(params.beta_inv_vhat, Some(-2));
        assert_eq!(params.multiplier, 1);
    }

    #[test]
    fn smallest_multiplier_skips_multiples_of_p() {
        // D/C + 1 = 7/3: N = 3 is excluded
        assert_eq!(smallest_multiplier(3, 3, 4), 4);
        assert_eq!(smallest_multiplier(3, 3, 1), 2);
        assert_eq!(smallest_multiplier(2, 2, 3), 3);
        assert_eq!(smallest_multiplier(3, 6, -2), 1);
    }

    #[test]
    fn counterexample_and_fix() {
        let params = choose_n(&example_alpha()).unwrap();
        let forced = params.clone().with_multiplier(1).unwrap();
        assert!(coding_check(&forced, 2, 1, WorkingPrecision::Auto).unwrap());
        assert!(!coding_check(&params, 2, 1, WorkingPrecision::Auto).unwrap());
        let report = coding_scan(&forced, 2, WorkingPrecision::Auto).unwrap();
        assert_eq!(report.mismatches, vec![(2, 1, true, false)]);
    }

    #[test]
    fn check_for_t() {
        let f3 = f("3");
        let params = choose_n(&Alpha::direct(s("t", &f3)).unwrap()).unwrap();
        assert!(coding_check(&params, 18, 2, WorkingPrecision::Auto).unwrap());
        assert!(coding_check(&params, 4, 4, WorkingPrecision::Auto).unwrap());
        assert!(!coding_check(&params, 2, 18, WorkingPrecision::Auto).unwrap());
    }

    #[test]
    fn fixed_precision_can_run_short() {
        let f3 = f("3");
        let params = choose_n(&Alpha::direct(s("t + t^2", &f3)).unwrap()).unwrap();
        // alpha^-3 has valuation -3; two relative terms leave exponent 0 unknown
        assert!(matches!(
            coding_check(&params, 3, 1, WorkingPrecision::Fixed(2)),
            Err(Error::PrecisionExceeded { .. })
        ));
        assert!(coding_check(&params, 3, 1, WorkingPrecision::Auto).unwrap());
        assert!(coding_check(&params, 3, 1, WorkingPrecision::Fixed(4)).unwrap());
    }

    #[test]
    fn positive_powers() {
        let alpha = example_alpha();
        assert!(alpha.is_positive_power(3));
        assert!(!alpha.is_positive_power(0));
        assert!(!alpha.is_positive_power(-2));
    }

    #[test]
    fn scan_report_json_shape() {
        let report = ScanReport {
            bound: 12,
            checked: 144,
            mismatches: vec![(2, 1, true, false)],
        };
        let json = serde_json::to_string(&report).unwrap();
        assert_eq!(json, r#"{"bound":12,"checked":144,"mismatches":[[2,1,true,false]]}"#);
    }
}
