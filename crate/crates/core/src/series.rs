//! Truncated Laurent series over `F_q`.
//!
//! A [`Series`] stores its nonzero coefficients sparsely together with a
//! precision `prec`: every coefficient at an exponent below `prec` is known
//! (absent means zero), nothing at or above `prec` is. `prec = +inf` marks an
//! exact Laurent polynomial. Every operation derives the precision of its
//! result from the precisions of its inputs, so a coefficient read below the
//! reported precision is always certain.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dense;
use crate::error::{Error, Result};
use crate::finite_field::{parse_field, Field, FqElement};
use crate::parse;

/// Precision bound of a series: a finite exponent or `+inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prec {
    Finite(i64),
    Infinite,
}

impl Prec {
    pub fn is_finite(self) -> bool {
        matches!(self, Prec::Finite(_))
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Prec::Finite(p) => Some(p),
            Prec::Infinite => None,
        }
    }

    /// `self + d`, with `+inf` absorbing.
    pub fn shift(self, d: i64) -> Prec {
        match self {
            Prec::Finite(p) => Prec::Finite(p.saturating_add(d)),
            Prec::Infinite => Prec::Infinite,
        }
    }

    pub fn plus(self, other: Prec) -> Prec {
        match other {
            Prec::Finite(d) => self.shift(d),
            Prec::Infinite => Prec::Infinite,
        }
    }

    /// `k * self` for `k > 0`.
    pub fn scale(self, k: i64) -> Prec {
        debug_assert!(k > 0);
        match self {
            Prec::Finite(p) => Prec::Finite(p.saturating_mul(k)),
            Prec::Infinite => Prec::Infinite,
        }
    }

    fn admits(self, e: i64) -> bool {
        Prec::Finite(e) < self
    }
}

impl From<i64> for Prec {
    fn from(p: i64) -> Self {
        Prec::Finite(p)
    }
}

impl PartialEq<i64> for Prec {
    fn eq(&self, other: &i64) -> bool {
        *self == Prec::Finite(*other)
    }
}

impl PartialOrd<i64> for Prec {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.partial_cmp(&Prec::Finite(*other))
    }
}

impl fmt::Display for Prec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prec::Finite(p) => write!(f, "{p}"),
            Prec::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Prec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.finite().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Prec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Option::<i64>::deserialize(d)?.map_or(Prec::Infinite, Prec::Finite))
    }
}

/// Result of `v_t` or `v̂_t` on a possibly truncated series.
///
/// `AtLeast(b)` means no qualifying exponent below `b` carries a nonzero
/// coefficient; `b` is the series' precision. `AtLeast(inf)` is the exact
/// value `+inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value")]
pub enum Valuation {
    Finite(i64),
    AtLeast(Prec),
}

/// The p-th-powers-omitting valuation has the same tri-state shape.
pub type VHat = Valuation;

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    /// Certified lower bound.
    pub fn lower_bound(self) -> Prec {
        match self {
            Valuation::Finite(v) => Prec::Finite(v),
            Valuation::AtLeast(b) => b,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "Finite({v})"),
            Valuation::AtLeast(b) => write!(f, "AtLeast({b})"),
        }
    }
}

/// Outcome of extracting a p-th root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PthRoot {
    Root(Series),
    NotAPthPower,
    /// The known window is consistent with a p-th power but the series is truncated.
    IndeterminateAtPrecision,
}

#[derive(Clone)]
pub struct Series {
    field: Field,
    coeffs: BTreeMap<i64, u64>,
    prec: Prec,
}

impl PartialEq for Series {
    fn eq(&self, other: &Self) -> bool {
        self.prec == other.prec && self.coeffs == other.coeffs && same_field(&self.field, &other.field)
    }
}

impl Eq for Series {}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series[{}]({})", self.field, self)
    }
}

fn same_field(a: &Field, b: &Field) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl Series {
    pub(crate) fn from_raw<I>(field: &Field, terms: I, prec: Prec) -> Series
    where
        I: IntoIterator<Item = (i64, u64)>,
    {
        let coeffs = terms
            .into_iter()
            .filter(|&(e, c)| c != 0 && prec.admits(e))
            .collect();
        Series {
            field: field.clone(),
            coeffs,
            prec,
        }
    }

    /// Builds a series from explicit terms; repeated exponents are summed.
    pub fn new(field: &Field, terms: &[(i64, FqElement)], prec: Prec) -> Result<Series> {
        let mut acc: BTreeMap<i64, u64> = BTreeMap::new();
        for (e, c) in terms {
            if !same_field(field, c.field()) {
                return Err(Error::MixedFields);
            }
            let slot = acc.entry(*e).or_insert(0);
            *slot = field.add(*slot, c.raw());
        }
        Ok(Self::from_raw(field, acc, prec))
    }

    pub fn zero(field: &Field) -> Series {
        Self::from_raw(field, [], Prec::Infinite)
    }

    pub fn one(field: &Field) -> Series {
        Self::from_raw(field, [(0, 1)], Prec::Infinite)
    }

    /// The exact monomial `c * t^e`.
    pub fn monomial(c: &FqElement, e: i64) -> Series {
        Self::from_raw(c.field(), [(e, c.raw())], Prec::Infinite)
    }

    /// The exact monomial `t^e`.
    pub fn t_pow(field: &Field, e: i64) -> Series {
        Self::from_raw(field, [(e, 1)], Prec::Infinite)
    }

    /// Parses the series grammar; the result is exact unless an `O(t^k)` term is present.
    pub fn parse(text: &str, field: &Field) -> Result<Series> {
        let parsed = parse::parse_series(text, field)?;
        let prec = parsed.prec.map_or(Prec::Infinite, Prec::Finite);
        Ok(Self::from_raw(field, parsed.terms, prec))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn prec(&self) -> Prec {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec == Prec::Infinite
    }

    /// No nonzero coefficient is known (exact zero or zero to precision).
    pub fn is_zero_known(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, FqElement)> + '_ {
        self.coeffs
            .iter()
            .map(|(&e, &c)| (e, FqElement::from_raw(&self.field, c)))
    }

    pub(crate) fn raw_terms(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    /// Coefficient at `e`, or `None` when `e` lies at or above the precision.
    pub fn coeff(&self, e: i64) -> Option<FqElement> {
        self.prec
            .admits(e)
            .then(|| FqElement::from_raw(&self.field, self.coeff_raw(e)))
    }

    pub(crate) fn coeff_raw(&self, e: i64) -> u64 {
        self.coeffs.get(&e).copied().unwrap_or(0)
    }

    pub(crate) fn lead(&self) -> Option<(i64, u64)> {
        self.coeffs.iter().next().map(|(&e, &c)| (e, c))
    }

    fn check_field(&self, other: &Series) -> Result<()> {
        if same_field(&self.field, &other.field) {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    /// Forgets everything at or above `prec` (no-op when already coarser).
    pub fn truncate(&self, prec: Prec) -> Series {
        let prec = prec.min(self.prec);
        Self::from_raw(&self.field, self.raw_terms(), prec)
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Series {
        Self::from_raw(
            &self.field,
            self.raw_terms().map(|(e, c)| (e + k, c)),
            self.prec.shift(k),
        )
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check_field(other)?;
        let f = &self.field;
        let mut coeffs = self.coeffs.clone();
        for (&e, &c) in &other.coeffs {
            let slot = coeffs.entry(e).or_insert(0);
            *slot = f.add(*slot, c);
        }
        Ok(Self::from_raw(f, coeffs, self.prec.min(other.prec)))
    }

    pub fn neg(&self) -> Series {
        let f = &self.field;
        Self::from_raw(f, self.raw_terms().map(|(e, c)| (e, f.neg(c))), self.prec)
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.add(&other.neg())
    }

    /// Product; precision `min(v(x) + prec(y), v(y) + prec(x))`.
    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check_field(other)?;
        let f = &self.field;
        let vx = self.vt().lower_bound();
        let vy = other.vt().lower_bound();
        let prec = vx.plus(other.prec).min(vy.plus(self.prec));
        let (Some((lo_x, _)), Some((lo_y, _))) = (self.lead(), other.lead()) else {
            return Ok(Self::from_raw(f, [], prec));
        };
        let hi_x = *self.coeffs.keys().next_back().unwrap();
        let hi_y = *other.coeffs.keys().next_back().unwrap();
        let lo = lo_x + lo_y;
        let hi = match prec {
            Prec::Finite(p) => p.min(hi_x + hi_y + 1),
            Prec::Infinite => hi_x + hi_y + 1,
        };
        if hi <= lo {
            return Ok(Self::from_raw(f, [], prec));
        }
        let ys: Vec<(i64, u64)> = other.raw_terms().collect();
        let mut acc = vec![0u64; (hi - lo) as usize];
        for (i, a) in self.raw_terms() {
            for &(j, b) in &ys {
                let k = i + j;
                if k >= hi {
                    break;
                }
                let slot = &mut acc[(k - lo) as usize];
                *slot = f.add(*slot, f.mul(a, b));
            }
        }
        Ok(Self::from_raw(
            f,
            acc.into_iter().enumerate().map(|(k, c)| (lo + k as i64, c)),
            prec,
        ))
    }

    /// Multiplication by a field constant.
    pub fn scale(&self, c: &FqElement) -> Result<Series> {
        if !same_field(&self.field, c.field()) {
            return Err(Error::MixedFields);
        }
        let f = &self.field;
        let prec = if c.is_zero() { Prec::Infinite } else { self.prec };
        Ok(Self::from_raw(
            f,
            self.raw_terms().map(|(e, a)| (e, f.mul(a, c.raw()))),
            prec,
        ))
    }

    /// `1/x` known below `target_prec`.
    ///
    /// Reachable precision is `prec(x) - 2 v(x)`; exact monomials invert exactly.
    pub fn inv(&self, target_prec: i64) -> Result<Series> {
        self.int_pow(-1, Prec::Finite(target_prec))
    }

    /// `x^e` known below `target`, truncated there.
    ///
    /// Relative precision is preserved, so the reachable precision is
    /// `e v(x) + (prec(x) - v(x))`. An infinite target asks for the exact
    /// power, which exists for exact `x` when `e >= 0` or `x` is a monomial.
    pub fn int_pow(&self, e: i64, target: Prec) -> Result<Series> {
        let f = &self.field;
        if e == 0 {
            return Ok(Series::one(f));
        }
        let Some((v, lead)) = self.lead() else {
            if e < 0 {
                return Err(if self.is_exact() {
                    Error::DivisionByZero
                } else {
                    Error::PrecisionExceeded {
                        needed: target,
                        available: Prec::Finite(i64::MIN),
                    }
                });
            }
            return Ok(Self::from_raw(f, [], self.prec.scale(e).min(target)));
        };
        let ev = e
            .checked_mul(v)
            .ok_or_else(|| Error::domain("exponent overflow in power"))?;
        if self.is_exact() && self.coeffs.len() == 1 {
            let c = f.pow(lead, e)?;
            return Ok(Self::from_raw(f, [(ev, c)], Prec::Infinite));
        }
        let rel_available = self.prec.shift(-v);
        let natural = rel_available.shift(ev);
        if target > natural {
            return Err(Error::PrecisionExceeded {
                needed: target,
                available: natural,
            });
        }
        let (rel, out_prec) = match target {
            Prec::Finite(t) => (t.saturating_sub(ev), target),
            Prec::Infinite => {
                if e < 0 {
                    return Err(Error::domain(
                        "the inverse of a non-monomial is an infinite series; give a finite target precision",
                    ));
                }
                let span = *self.coeffs.keys().next_back().unwrap() - v;
                let len = span
                    .checked_mul(e)
                    .and_then(|l| l.checked_add(1))
                    .ok_or_else(|| Error::domain("exact power too large"))?;
                (len, Prec::Infinite)
            }
        };
        if rel <= 0 {
            return Ok(Self::from_raw(f, [], out_prec));
        }
        let len = usize::try_from(rel).map_err(|_| Error::domain("precision too large"))?;
        let mut unit = vec![0u64; len];
        for (k, c) in self.raw_terms() {
            let idx = (k - v) as usize;
            if idx < len {
                unit[idx] = c;
            }
        }
        if e < 0 {
            unit = dense::inv_trunc(f, &unit, len);
        }
        let powered = dense::pow_trunc(f, &unit, e.unsigned_abs(), len);
        Ok(Self::from_raw(
            f,
            powered
                .into_iter()
                .enumerate()
                .map(|(k, c)| (ev + k as i64, c)),
            out_prec,
        ))
    }

    /// `v_t`: the least exponent with a nonzero coefficient.
    pub fn vt(&self) -> Valuation {
        match self.lead() {
            Some((e, _)) => Valuation::Finite(e),
            None => Valuation::AtLeast(self.prec),
        }
    }

    /// `v̂_t`: the least exponent not divisible by `p` with a nonzero coefficient.
    pub fn vhat(&self) -> VHat {
        let p = self.field.characteristic() as i64;
        match self.coeffs.keys().find(|&&e| e.rem_euclid(p) != 0) {
            Some(&e) => Valuation::Finite(e),
            None => Valuation::AtLeast(self.prec),
        }
    }

    /// `Σ a_i t^i -> Σ a_i^p t^(p i)`.
    pub fn frobenius(&self) -> Series {
        let f = &self.field;
        let p = f.characteristic() as i64;
        Self::from_raw(
            f,
            self.raw_terms().map(|(e, c)| (e * p, f.frobenius(c))),
            self.prec.scale(p),
        )
    }

    /// Inverse of [`Series::frobenius`] on `F_q((t^p))`.
    pub fn pth_root(&self) -> PthRoot {
        let f = &self.field;
        let p = f.characteristic() as i64;
        if self.coeffs.keys().any(|e| e.rem_euclid(p) != 0) {
            return PthRoot::NotAPthPower;
        }
        if !self.is_exact() {
            return PthRoot::IndeterminateAtPrecision;
        }
        PthRoot::Root(Self::from_raw(
            f,
            self.raw_terms().map(|(e, c)| (e / p, f.frobenius_inv(c))),
            Prec::Infinite,
        ))
    }

    /// Splits `x = beta + gamma`: `beta` carries the exponents divisible by `p`,
    /// `gamma` the rest. Both keep the precision of `x`.
    pub fn decompose_p(&self) -> (Series, Series) {
        let p = self.field.characteristic() as i64;
        let (beta, gamma): (Vec<_>, Vec<_>) =
            self.raw_terms().partition(|(e, _)| e.rem_euclid(p) == 0);
        (
            Self::from_raw(&self.field, beta, self.prec),
            Self::from_raw(&self.field, gamma, self.prec),
        )
    }

    /// Whether `self` and `other` agree at every exponent below `bound`.
    pub fn eq_upto(&self, other: &Series, bound: i64) -> Result<bool> {
        self.check_field(other)?;
        let available = self.prec.min(other.prec);
        if Prec::Finite(bound) > available {
            return Err(Error::PrecisionExceeded {
                needed: Prec::Finite(bound),
                available,
            });
        }
        let below = |s: &Series| -> Vec<(i64, u64)> {
            s.raw_terms().take_while(|&(e, _)| e < bound).collect()
        };
        Ok(below(self) == below(other))
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            field: self.field.to_string(),
            prec: self.prec,
            coeffs: self
                .raw_terms()
                .map(|(e, c)| (e, self.field.format_elem(c)))
                .collect(),
        }
    }

    pub fn from_json(json: &SeriesJson) -> Result<Series> {
        let field = parse_field(&json.field)?;
        let mut terms = Vec::with_capacity(json.coeffs.len());
        for (e, c) in &json.coeffs {
            terms.push((*e, FqElement::parse(c, &field)?));
        }
        Series::new(&field, &terms, json.prec)
    }
}

/// JSON form: `{"field": "3", "prec": 64, "coeffs": [[-3, "1"], [0, "1"]]}`;
/// `prec` is `null` for exact series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub field: String,
    pub prec: Prec,
    pub coeffs: Vec<(i64, String)>,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let field = &self.field;
        let mut parts: Vec<String> = self
            .raw_terms()
            .map(|(e, c)| {
                let mono = match e {
                    0 => None,
                    1 => Some("t".to_string()),
                    _ => Some(format!("t^{e}")),
                };
                let coeff = field.format_elem(c);
                match mono {
                    None if field.is_single_term(c) => coeff,
                    None => format!("({coeff})"),
                    Some(m) if c == 1 => m,
                    Some(m) if field.is_single_term(c) => format!("{coeff}*{m}"),
                    Some(m) => format!("({coeff})*{m}"),
                }
            })
            .collect();
        if let Prec::Finite(p) = self.prec {
            parts.push(match p {
                1 => "O(t)".to_string(),
                _ => format!("O(t^{p})"),
            });
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}
