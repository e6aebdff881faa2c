//! Truncated dense power series over a field, `a[k]` multiplying `t^k`.
//!
//! These are the inner loops behind series powers and inverses; callers
//! strip valuations first so every operand is a unit or at least integral.

use crate::finite_field::FieldSpec;

/// `a * b mod t^len`.
pub(crate) fn mul_trunc(f: &FieldSpec, a: &[u64], b: &[u64], len: usize) -> Vec<u64> {
    let mut out = vec![0u64; len];
    if f.degree() == 1 {
        let p = f.characteristic() as u128;
        for (k, slot) in out.iter_mut().enumerate() {
            let lo = k.saturating_sub(b.len().saturating_sub(1));
            let hi = k.min(a.len().saturating_sub(1));
            if a.is_empty() || b.is_empty() || lo > hi {
                continue;
            }
            let mut acc: u128 = 0;
            for i in lo..=hi {
                acc += a[i] as u128 * b[k - i] as u128;
            }
            *slot = (acc % p) as u64;
        }
    } else {
        for (i, &x) in a.iter().enumerate().take(len) {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate().take(len - i) {
                if y != 0 {
                    out[i + j] = f.add(out[i + j], f.mul(x, y));
                }
            }
        }
    }
    out
}

/// Inverse of a unit `a` (with `a[0] != 0`) modulo `t^len`, by Newton
/// iteration `y <- y (2 - a y)`, doubling the number of correct terms.
pub(crate) fn inv_trunc(f: &FieldSpec, a: &[u64], len: usize) -> Vec<u64> {
    debug_assert!(!a.is_empty() && a[0] != 0);
    if len == 0 {
        return Vec::new();
    }
    let mut y = vec![f.inv(a[0]).expect("unit has nonzero constant term")];
    let two = f.from_i64(2);
    let mut known = 1;
    while known < len {
        known = (2 * known).min(len);
        let head = &a[..a.len().min(known)];
        let mut e = mul_trunc(f, head, &y, known);
        for c in e.iter_mut() {
            *c = f.neg(*c);
        }
        e[0] = f.add(e[0], two);
        y = mul_trunc(f, &y, &e, known);
    }
    y
}

/// `a^e mod t^len` by square-and-multiply.
pub(crate) fn pow_trunc(f: &FieldSpec, a: &[u64], e: u64, len: usize) -> Vec<u64> {
    let mut acc = vec![0u64; len.min(1)];
    if len == 0 {
        return acc;
    }
    acc[0] = 1;
    let mut base: Vec<u64> = a.iter().copied().take(len).collect();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_trunc(f, &acc, &base, len);
        }
        e >>= 1;
        if e > 0 {
            base = mul_trunc(f, &base, &base, len);
        }
    }
    acc
}
