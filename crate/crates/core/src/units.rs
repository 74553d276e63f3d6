//! Fixed-point lengths.
//!
//! Eagle writes coordinates as decimal millimetres. They are stored here as a
//! whole number of nanometres (1e-6 mm), so grid and extent arithmetic is
//! exact and independent of float rounding.

use core::fmt;
use core::ops::{Add, Neg, Sub};

/// A length or coordinate in millimetres, stored as integer nanometres.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Mm(i64);

const NM_PER_MM: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid decimal length {0:?}")]
pub struct ParseMmError(pub alloc::string::String);

impl Mm {
    pub const ZERO: Mm = Mm(0);

    pub const fn from_nm(nm: i64) -> Self {
        Mm(nm)
    }

    pub const fn from_mm(mm: i64) -> Self {
        Mm(mm * NM_PER_MM)
    }

    pub const fn nm(self) -> i64 {
        self.0
    }

    pub const fn abs(self) -> Self {
        Mm(self.0.abs())
    }

    /// Lossy conversion for display and JSON output.
    pub fn to_f64(self) -> f64 {
        self.0 as f64 / NM_PER_MM as f64
    }

    /// Parse a plain decimal such as `-12.7`, `2.54` or `.5`.
    ///
    /// Digits past the sixth decimal place are rounded half away from zero.
    pub fn parse(text: &str) -> Result<Mm, ParseMmError> {
        let err = || ParseMmError(text.into());
        let s = text.trim();
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(err());
        }

        let mut whole: i64 = 0;
        for b in int_part.bytes() {
            whole = whole
                .checked_mul(10)
                .and_then(|v| v.checked_add(i64::from(b - b'0')))
                .ok_or_else(err)?;
        }
        let mut frac: i64 = 0;
        let mut digits = frac_part.bytes();
        for _ in 0..6 {
            let d = digits.next().map_or(0, |b| i64::from(b - b'0'));
            frac = frac * 10 + d;
        }
        if digits.next().is_some_and(|b| b >= b'5') {
            frac += 1;
        }
        let nm = whole
            .checked_mul(NM_PER_MM)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(err)?;
        Ok(Mm(if negative { -nm } else { nm }))
    }

    /// True when `self` lies within `tolerance` of an integer multiple of `step`.
    pub fn is_multiple_of(self, step: Mm, tolerance: Mm) -> bool {
        if step.0 <= 0 {
            return false;
        }
        let r = self.0.rem_euclid(step.0);
        r <= tolerance.0 || step.0 - r <= tolerance.0
    }
}

impl Add for Mm {
    type Output = Mm;
    fn add(self, rhs: Mm) -> Mm {
        Mm(self.0 + rhs.0)
    }
}

impl Sub for Mm {
    type Output = Mm;
    fn sub(self, rhs: Mm) -> Mm {
        Mm(self.0 - rhs.0)
    }
}

impl Neg for Mm {
    type Output = Mm;
    fn neg(self) -> Mm {
        Mm(-self.0)
    }
}

/// Shortest decimal form: `2.54`, `-0.5`, `80`.
impl fmt::Display for Mm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let whole = abs / NM_PER_MM as u64;
        let mut frac = abs % NM_PER_MM as u64;
        if frac == 0 {
            return write!(f, "{sign}{whole}");
        }
        let mut width = 6;
        while frac.is_multiple_of(10) {
            frac /= 10;
            width -= 1;
        }
        write!(f, "{sign}{whole}.{frac:0width$}")
    }
}

impl core::str::FromStr for Mm {
    type Err = ParseMmError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mm::parse(s)
    }
}
