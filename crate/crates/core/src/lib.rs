//! Exact arithmetic in `F_q((t))` and the Artin–Schreier coding of
//! p-divisibility.
//!
//! * [`finite_field`]: `F_q = F_p[x]/(f)` with Frobenius, trace and the
//!   constant Artin–Schreier equation.
//! * [`series`]: truncated Laurent series with certified precision, the
//!   valuations `v_t` and `v̂_t`, p-th roots.
//! * [`artin_schreier`]: deciding and solving `a^p - a = x`.
//! * [`pdiv`]: coding `n |_p m` through powers of an element of positive
//!   valuation, including the choice of the multiplier `N`.

pub mod artin_schreier;
mod dense;
pub mod error;
pub mod finite_field;
mod parse;
pub mod pdiv;
pub mod series;

pub use artin_schreier::{as_decide, as_solve, as_verify, verifiable_bound, ASOutcome, ASVerdict, Obstruction};
pub use error::{Error, Result};
pub use finite_field::{parse_field, Field, FieldSpec, FqElement};
pub use pdiv::{
    choose_n, coding_check, coding_scan, normalize_pth_power, pdiv_oracle, pdiv_witness, Alpha,
    CodingParams, CodingSummary, ScanReport, WorkingPrecision,
};
pub use series::{Prec, PthRoot, Series, SeriesJson, VHat, Valuation};
