//! JSON-in, JSON-out wrappers around `ascoder-core` for the browser page.
//!
//! Every exported function returns a JSON string; failures come back as
//! `{"error": "..."}` so the page never has to catch exceptions.

use ascoder_core::{
    as_solve, choose_n, coding_check, parse_field, pdiv_oracle, verifiable_bound, ASOutcome,
    Alpha, Obstruction, Prec, Series, WorkingPrecision,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

/// Largest scan bound the page may request.
pub const MAX_BOUND: u64 = 24;

const EXPANSION_TERMS: i64 = 24;

fn finish(result: Result<Value, String>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn read_alpha(field: &str, alpha: &str, inverse: bool) -> Result<Alpha, String> {
    let f = parse_field(field).map_err(|e| e.to_string())?;
    let s = Series::parse(alpha, &f).map_err(|e| e.to_string())?;
    let a = if inverse {
        Alpha::from_inverse(s)
    } else {
        Alpha::direct(s)
    };
    a.map_err(|e| e.to_string())
}

fn explore_inner(field: &str, alpha: &str, inverse: bool) -> Result<Value, String> {
    let a = read_alpha(field, alpha, inverse)?;
    let v = a.valuation();
    let err = |e: ascoder_core::Error| e.to_string();
    let expansion = a.pow(1, Prec::Finite(v + EXPANSION_TERMS)).map_err(err)?;
    let inverse_expansion = a.pow(-1, Prec::Finite(-v + EXPANSION_TERMS)).map_err(err)?;
    let params = choose_n(&a).map_err(err)?;
    Ok(json!({
        "alpha": expansion.to_string(),
        "alpha_inv": inverse_expansion.to_string(),
        "vt": v,
        "vhat": expansion.vhat().to_string(),
        "vhat_inv": inverse_expansion.vhat().to_string(),
        "beta": params.beta.to_string(),
        "params": params.summary(),
        "summary": params.summary().to_string(),
    }))
}

fn scan_inner(field: &str, alpha: &str, inverse: bool, multiplier: u32, bound: u32) -> Result<Value, String> {
    let bound = u64::from(bound);
    if bound == 0 || bound > MAX_BOUND {
        return Err(format!("bound must be between 1 and {MAX_BOUND}"));
    }
    let a = read_alpha(field, alpha, inverse)?;
    let err = |e: ascoder_core::Error| e.to_string();
    let mut params = choose_n(&a).map_err(err)?;
    if multiplier > 0 {
        params = params.with_multiplier(u64::from(multiplier)).map_err(err)?;
    }
    let p = a.field().characteristic();
    // cells[m-1][n-1] = [coding, oracle]
    let mut cells = Vec::new();
    let mut mismatches = 0;
    for m in 1..=bound {
        let mut row = Vec::new();
        for n in 1..=bound {
            let coding = coding_check(&params, m, n, WorkingPrecision::Auto).map_err(err)?;
            let oracle = pdiv_oracle(p, n, m).map_err(err)?;
            mismatches += usize::from(coding != oracle);
            row.push(json!([coding, oracle]));
        }
        cells.push(Value::Array(row));
    }
    Ok(json!({
        "N": params.multiplier,
        "summary": params.summary().to_string(),
        "bound": bound,
        "mismatches": mismatches,
        "cells": cells,
    }))
}

fn solve_inner(field: &str, x: &str, prec: i32) -> Result<Value, String> {
    let f = parse_field(field).map_err(|e| e.to_string())?;
    let x = Series::parse(x, &f).map_err(|e| e.to_string())?;
    let prec = i64::from(prec);
    let out = as_solve(&x, prec).map_err(|e| e.to_string())?;
    Ok(match &out {
        ASOutcome::Solvable(w) => json!({
            "outcome": "Solvable",
            "witness": w.to_string(),
            "verified_to": verifiable_bound(w, &x),
        }),
        ASOutcome::Unsolvable(o) => {
            let reason = match o {
                Obstruction::NonPDivisibleNegativeValuation(v) => format!(
                    "after clearing p-divisible poles the leading exponent is {v}, which p does not divide"
                ),
                Obstruction::TraceObstruction(c) => {
                    format!("the constant term {c} has nonzero trace to F_p")
                }
            };
            json!({ "outcome": "Unsolvable", "obstruction": o.to_string(), "reason": reason })
        }
        ASOutcome::Indeterminate(p) => json!({ "outcome": "Indeterminate", "needed_prec": p }),
    })
}

/// Valuations, expansions and coding parameters of `alpha`.
#[wasm_bindgen]
pub fn explore(field: &str, alpha: &str, inverse: bool) -> String {
    finish(explore_inner(field, alpha, inverse))
}

/// Coding verdict against p-divisibility on the grid `1 <= m, n <= bound`.
/// `multiplier = 0` uses the chosen `N`.
#[wasm_bindgen]
pub fn scan(field: &str, alpha: &str, inverse: bool, multiplier: u32, bound: u32) -> String {
    finish(scan_inner(field, alpha, inverse, multiplier, bound))
}

/// Solves `a^p - a = x` with the witness known below `t^prec`.
#[wasm_bindgen]
pub fn solve(field: &str, x: &str, prec: i32) -> String {
    finish(solve_inner(field, x, prec))
}
