//! Arithmetic in `F_q = F_p[x]/(f)`.
//!
//! Elements are packed into a single `u64` holding the coefficient vector in
//! base `p` (coefficient `j` multiplies `x^j` and occupies digit `j`). The
//! packed form is what the series code stores; [`FqElement`] is the checked,
//! field-carrying wrapper handed out through the public API.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::parse;

/// Largest supported characteristic.
pub const MAX_P: u64 = 1 << 31;

/// Fields of at most this many elements get precomputed add/mul tables.
const TABLE_LIMIT: u64 = 256;

/// Moduli used when a field is named only by its order (`"9"` or `"3^2"`).
const BUILTIN_MODULI: &[(u64, u32, &[u64])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (3, 2, &[1, 0, 1]),
    (5, 2, &[2, 0, 1]),
    (3, 3, &[1, 2, 0, 1]),
];

/// The finite field `F_p[x]/(modulus)`; the modulus is monic and irreducible.
#[derive(Clone)]
pub struct FieldSpec {
    p: u64,
    n: u32,
    q: u64,
    /// Coefficients of the modulus, lowest degree first, length `n + 1`.
    modulus: Vec<u64>,
    add_table: Vec<u8>,
    mul_table: Vec<u8>,
}

/// Shared handle to a field; series and elements hold one of these.
pub type Field = Arc<FieldSpec>;

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldSpec({self})")
    }
}

impl FieldSpec {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Field> {
        Self::build(p, vec![0, 1])
    }

    /// `F_p[x]/(modulus)`, with the modulus given lowest degree first.
    pub fn extension(p: u64, modulus: Vec<u64>) -> Result<Field> {
        Self::build(p, modulus)
    }

    /// `F_q` for `q` prime or one of the orders in the built-in modulus table.
    pub fn of_order(q: u64) -> Result<Field> {
        if is_prime(q) {
            return Self::prime(q);
        }
        for &(p, n, m) in BUILTIN_MODULI {
            if p.pow(n) == q {
                return Self::extension(p, m.to_vec());
            }
        }
        let p = (2..=q).find(|d| q % d == 0).unwrap_or(q);
        let mut r = q;
        while r > 1 && r % p == 0 {
            r /= p;
        }
        if q < 2 || r != 1 {
            return Err(Error::InvalidField(format!("{q} is not a prime power")));
        }
        Err(Error::InvalidField(format!(
            "no built-in modulus for q = {q}; use the form p^n/modulus"
        )))
    }

    fn build(p: u64, modulus: Vec<u64>) -> Result<Field> {
        if !(2..=MAX_P).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a supported prime")));
        }
        let mut modulus = modulus;
        while modulus.len() > 1 && modulus.last() == Some(&0) {
            modulus.pop();
        }
        if modulus.len() < 2 {
            return Err(Error::InvalidField("modulus must have degree at least 1".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField("modulus coefficients must lie in [0, p)".into()));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        let n = (modulus.len() - 1) as u32;
        if n == 1 && modulus[0] != 0 {
            return Err(Error::InvalidField("degree-1 fields use the modulus x".into()));
        }
        let q = p
            .checked_pow(n)
            .filter(|&q| q <= 1 << 63)
            .ok_or_else(|| Error::InvalidField(format!("{p}^{n} exceeds 2^63")))?;
        if n > 1 && !poly::is_irreducible(&modulus, p) {
            return Err(Error::InvalidField(format!(
                "{} is reducible over F_{p}",
                poly::format_in(&modulus, 'x')
            )));
        }
        let mut spec = FieldSpec {
            p,
            n,
            q,
            modulus,
            add_table: Vec::new(),
            mul_table: Vec::new(),
        };
        if n > 1 && q <= TABLE_LIMIT {
            let mut add = Vec::with_capacity((q * q) as usize);
            let mut mul = Vec::with_capacity((q * q) as usize);
            for a in 0..q {
                for b in 0..q {
                    add.push(spec.add_slow(a, b) as u8);
                    mul.push(spec.mul_slow(a, b) as u8);
                }
            }
            spec.add_table = add;
            spec.mul_table = mul;
        }
        Ok(Arc::new(spec))
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    // ---- packed-element arithmetic -------------------------------------

    pub(crate) fn decode(&self, a: u64) -> Vec<u64> {
        let mut out = vec![0; self.n as usize];
        let mut a = a;
        for c in out.iter_mut() {
            *c = a % self.p;
            a /= self.p;
        }
        out
    }

    pub(crate) fn encode(&self, coeffs: &[u64]) -> u64 {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c % self.p)
    }

    /// Packed value of the integer `k` reduced into the prime subfield.
    pub(crate) fn from_i64(&self, k: i64) -> u64 {
        k.rem_euclid(self.p as i64) as u64
    }

    pub(crate) fn from_u128(&self, k: u128) -> u64 {
        (k % self.p as u128) as u64
    }

    /// Packed value of the generator `x`.
    pub(crate) fn generator(&self) -> Result<u64> {
        if self.n == 1 {
            return Err(Error::domain("the generator g is only available when n > 1"));
        }
        Ok(self.p)
    }

    #[inline]
    pub(crate) fn add(&self, a: u64, b: u64) -> u64 {
        if self.n == 1 {
            let s = a + b;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        } else if !self.add_table.is_empty() {
            self.add_table[(a * self.q + b) as usize] as u64
        } else {
            self.add_slow(a, b)
        }
    }

    fn add_slow(&self, a: u64, b: u64) -> u64 {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.n {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place = place.wrapping_mul(self.p);
        }
        out
    }

    #[inline]
    pub(crate) fn neg(&self, a: u64) -> u64 {
        if self.n == 1 {
            if a == 0 {
                0
            } else {
                self.p - a
            }
        } else {
            let c: Vec<u64> = self
                .decode(a)
                .into_iter()
                .map(|c| (self.p - c) % self.p)
                .collect();
            self.encode(&c)
        }
    }

    #[inline]
    pub(crate) fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub(crate) fn mul(&self, a: u64, b: u64) -> u64 {
        if self.n == 1 {
            // p < 2^31 keeps the product inside u64.
            a * b % self.p
        } else if !self.mul_table.is_empty() {
            self.mul_table[(a * self.q + b) as usize] as u64
        } else {
            self.mul_slow(a, b)
        }
    }

    fn mul_slow(&self, a: u64, b: u64) -> u64 {
        let prod = poly::mul(&self.decode(a), &self.decode(b), self.p);
        self.encode(&poly::rem(&prod, &self.modulus, self.p))
    }

    pub(crate) fn pow_u(&self, a: u64, e: u64) -> u64 {
        let mut base = a;
        let mut e = e;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub(crate) fn inv(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        if self.n == 1 {
            return Ok(inv_mod(a, self.p));
        }
        Ok(self.pow_u(a, self.q - 2))
    }

    pub(crate) fn pow(&self, a: u64, e: i64) -> Result<u64> {
        if a == 0 {
            return match e.signum() {
                -1 => Err(Error::DivisionByZero),
                0 => Ok(1),
                _ => Ok(0),
            };
        }
        let order = self.q - 1;
        let r = (e as i128).rem_euclid(order as i128) as u64;
        Ok(self.pow_u(a, r))
    }

    pub(crate) fn frobenius(&self, a: u64) -> u64 {
        if self.n == 1 {
            a
        } else {
            self.pow_u(a, self.p)
        }
    }

    pub(crate) fn frobenius_inv(&self, a: u64) -> u64 {
        if self.n == 1 {
            a
        } else {
            // Frobenius has order n, so its inverse is x -> x^(p^(n-1)).
            self.pow_u(a, self.q / self.p)
        }
    }

    /// Absolute trace to `F_p`, returned as a residue.
    pub(crate) fn trace(&self, a: u64) -> u64 {
        let mut acc = 0;
        let mut cur = a;
        for _ in 0..self.n {
            acc = self.add(acc, cur);
            cur = self.frobenius(cur);
        }
        debug_assert!(acc < self.p);
        acc
    }

    /// The solution of `e^p - e = c` with zero constant coefficient, if any.
    ///
    /// Solutions form a coset `e + F_p`, so they differ only in the constant
    /// coefficient; the one with constant coefficient zero is the
    /// lexicographically least coefficient vector.
    pub(crate) fn as_const_solve(&self, c: u64) -> Option<u64> {
        if self.trace(c) != 0 {
            return None;
        }
        if c == 0 || self.n == 1 {
            return Some(0);
        }
        let n = self.n as usize;
        let p = self.p;
        // Column j-1 is the image of x^j under e -> e^p - e, for j = 1..n.
        let mut rows: Vec<Vec<u64>> = vec![vec![0; n]; n];
        for j in 1..n {
            let basis = self.pow_u(self.p, j as u64);
            let image = self.decode(self.sub(self.frobenius(basis), basis));
            for (i, &v) in image.iter().enumerate() {
                rows[i][j - 1] = v;
            }
        }
        for (i, &v) in self.decode(c).iter().enumerate() {
            rows[i][n - 1] = v;
        }
        let solution = solve_mod_p(rows, n - 1, p)?;
        let mut coeffs = vec![0; n];
        coeffs[1..].copy_from_slice(&solution);
        let e = self.encode(&coeffs);
        debug_assert_eq!(self.sub(self.frobenius(e), e), c);
        Some(e)
    }

    // ---- text format ----------------------------------------------------

    /// Element text: a decimal residue for `n = 1`, otherwise a polynomial in `g`.
    pub(crate) fn format_elem(&self, a: u64) -> String {
        if self.n == 1 {
            a.to_string()
        } else {
            poly::format_in(&self.decode(a), 'g')
        }
    }

    /// True when the element's text form is a single monomial (no `+`).
    pub(crate) fn is_single_term(&self, a: u64) -> bool {
        self.n == 1 || self.decode(a).iter().filter(|&&c| c != 0).count() <= 1
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}^{}/{}", self.p, self.n, poly::format_in(&self.modulus, 'x'))
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Accepts `"p"`, `"q"` (built-in table), `"p^n"` or `"p^n/modulus"`.
    fn from_str(s: &str) -> Result<Self> {
        parse_field(s).map(|f| (*f).clone())
    }
}

/// Parses the field text format into a shared handle.
pub fn parse_field(text: &str) -> Result<Field> {
    let text = text.trim();
    let (head, modulus) = match text.split_once('/') {
        Some((h, m)) => (h.trim(), Some(m)),
        None => (text, None),
    };
    let (p, n) = match head.split_once('^') {
        Some((p, n)) => (parse_u64(p)?, Some(parse_u64(n)? as u32)),
        None => (parse_u64(head)?, None),
    };
    match (n, modulus) {
        (None, None) => FieldSpec::of_order(p),
        (Some(n), None) => {
            let q = p
                .checked_pow(n)
                .ok_or_else(|| Error::InvalidField(format!("{p}^{n} overflows")))?;
            if n == 1 {
                FieldSpec::prime(p)
            } else if is_prime(p) {
                FieldSpec::of_order(q)
            } else {
                Err(Error::InvalidField(format!("{p} is not prime")))
            }
        }
        (n, Some(m)) => {
            if !is_prime(p) || p > MAX_P {
                return Err(Error::InvalidField(format!("{p} is not a supported prime")));
            }
            let coeffs = parse::parse_modulus(m, p)?;
            let field = FieldSpec::extension(p, coeffs)?;
            if let Some(n) = n {
                if field.degree() != n {
                    return Err(Error::InvalidField(format!(
                        "modulus has degree {}, expected {n}",
                        field.degree()
                    )));
                }
            }
            Ok(field)
        }
    }
}

fn parse_u64(s: &str) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidField(format!("expected an integer, found {s:?}")))
}

/// Trial division; adequate for `p <= 2^31`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i64, a as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(p as i64) as u64
}

/// Solves a consistent `rows x (unknowns + 1)` augmented system mod `p`
/// whose coefficient matrix has full column rank.
fn solve_mod_p(mut rows: Vec<Vec<u64>>, unknowns: usize, p: u64) -> Option<Vec<u64>> {
    let mut pivot_row = 0;
    let mut pivots = Vec::with_capacity(unknowns);
    for col in 0..unknowns {
        let found = (pivot_row..rows.len()).find(|&r| rows[r][col] != 0)?;
        rows.swap(pivot_row, found);
        let inv = inv_mod(rows[pivot_row][col], p);
        for v in rows[pivot_row].iter_mut() {
            *v = *v * inv % p;
        }
        for r in 0..rows.len() {
            if r != pivot_row && rows[r][col] != 0 {
                let factor = rows[r][col];
                for c in 0..=unknowns {
                    let sub = factor * rows[pivot_row][c] % p;
                    rows[r][c] = (rows[r][c] + p - sub) % p;
                }
            }
        }
        pivots.push(pivot_row);
        pivot_row += 1;
    }
    if rows[pivot_row..].iter().any(|r| r[unknowns] != 0) {
        return None;
    }
    Some(pivots.iter().map(|&r| rows[r][unknowns]).collect())
}

/// Dense polynomials over `F_p`, lowest degree first.
mod poly {
    pub(super) fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub(super) fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y % p) % p;
            }
        }
        trim(out)
    }

    /// Remainder modulo a monic polynomial.
    pub(super) fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = trim(a.to_vec());
        let d = m.len() - 1;
        while r.len() > d {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - d;
            for (i, &c) in m.iter().enumerate() {
                let sub = lead * c % p;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
            r = trim(r);
        }
        r
    }

    fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let len = a.len().max(b.len());
        let out = (0..len)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    fn pow_mod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &b, p), m, p);
            }
            b = rem(&mul(&b, &b, p), m, p);
            e >>= 1;
        }
        acc
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let inv = super::inv_mod(*b.last().unwrap(), p);
            let monic: Vec<u64> = b.iter().map(|&c| c * inv % p).collect();
            let r = rem(&a, &monic, p);
            a = monic;
            b = r;
        }
        a
    }

    fn prime_factors(mut n: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                out.push(d);
                while n % d == 0 {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }

    /// Rabin's test: `x^(p^n) = x mod f` and `gcd(x^(p^(n/r)) - x, f) = 1`
    /// for every prime `r | n`.
    pub(super) fn is_irreducible(f: &[u64], p: u64) -> bool {
        let n = (f.len() - 1) as u32;
        let x = vec![0, 1];
        // frob[k] = x^(p^k) mod f
        let mut frob = vec![rem(&x, f, p)];
        for k in 1..=n as usize {
            let next = pow_mod(&frob[k - 1], p, f, p);
            frob.push(next);
        }
        if sub(&frob[n as usize], &rem(&x, f, p), p) != Vec::<u64>::new() {
            return false;
        }
        prime_factors(n).into_iter().all(|r| {
            let h = sub(&frob[(n / r) as usize], &x, p);
            gcd(f, &h, p).len() == 1
        })
    }

    /// Highest degree first, e.g. `g^2+2*g+1`.
    pub(super) fn format_in(c: &[u64], var: char) -> String {
        let mut parts = Vec::new();
        for (i, &v) in c.iter().enumerate().rev() {
            if v == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            parts.push(match (v, i) {
                (_, 0) => v.to_string(),
                (1, _) => mono,
                _ => format!("{v}*{mono}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}

/// An element of `F_q` carrying its field.
#[derive(Clone, PartialEq, Eq)]
pub struct FqElement {
    field: Field,
    value: u64,
}

impl fmt::Debug for FqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FqElement({} in {})", self, self.field)
    }
}

impl fmt::Display for FqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format_elem(self.value))
    }
}

impl FqElement {
    /// Builds an element from its coefficient vector (length `n`, entries in `[0, p)`).
    pub fn new(field: &Field, coeffs: &[u64]) -> Result<Self> {
        if coeffs.len() != field.n as usize {
            return Err(Error::domain(format!(
                "expected {} coefficients, got {}",
                field.n,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|&c| c >= field.p) {
            return Err(Error::domain("coefficients must lie in [0, p)"));
        }
        Ok(Self::from_raw(field, field.encode(coeffs)))
    }

    pub fn from_int(field: &Field, k: i64) -> Self {
        Self::from_raw(field, field.from_i64(k))
    }

    pub fn zero(field: &Field) -> Self {
        Self::from_raw(field, 0)
    }

    pub fn one(field: &Field) -> Self {
        Self::from_raw(field, 1)
    }

    pub(crate) fn from_raw(field: &Field, value: u64) -> Self {
        debug_assert!(value < field.q);
        FqElement {
            field: field.clone(),
            value,
        }
    }

    pub(crate) fn raw(&self) -> u64 {
        self.value
    }

    /// Every element of the field, in packed order.
    pub fn all(field: &Field) -> impl Iterator<Item = FqElement> + '_ {
        (0..field.q).map(move |v| Self::from_raw(field, v))
    }

    pub fn parse(text: &str, field: &Field) -> Result<Self> {
        parse::parse_element(text, field).map(|v| Self::from_raw(field, v))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> Vec<u64> {
        self.field.decode(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    fn with(&self, value: u64) -> Self {
        Self::from_raw(&self.field, value)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> Self {
        self.with(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(self.with(self.field.inv(self.value)?))
    }

    /// `self^e`; negative exponents require a nonzero base.
    pub fn pow(&self, e: i64) -> Result<Self> {
        Ok(self.with(self.field.pow(self.value, e)?))
    }

    /// `x -> x^p`.
    pub fn frobenius(&self) -> Self {
        self.with(self.field.frobenius(self.value))
    }

    /// The unique `y` with `y^p = self`.
    pub fn frobenius_inv(&self) -> Self {
        self.with(self.field.frobenius_inv(self.value))
    }

    /// `x + x^p + ... + x^(p^(n-1))`, as a residue mod `p`.
    pub fn trace(&self) -> u64 {
        self.field.trace(self.value)
    }

    /// Canonical solution of `e^p - e = self`, or `None` when `Tr(self) != 0`.
    pub fn as_const_solve(&self) -> Option<Self> {
        self.field.as_const_solve(self.value).map(|v| self.with(v))
    }
}
