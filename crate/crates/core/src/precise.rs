//! High-precision reals for logarithms, the square-lattice product formula
//! and the square-lattice entropy constant `G / pi`.
//!
//! Everything is carried at [`PRECISION_BITS`] bits (about 77 decimal
//! digits), far more than any comparison in this crate needs.

use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigUint;
use serde::{Serialize, Serializer};

pub const PRECISION_BITS: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;
const P: usize = PRECISION_BITS;

fn consts() -> Consts {
    Consts::new().expect("astro-float constant cache")
}

/// A real number at working precision.
#[derive(Debug, Clone)]
pub struct Real(BigFloat);

impl Real {
    pub fn from_u64(v: u64) -> Self {
        Real(BigFloat::from_u64(v, P))
    }

    pub fn from_biguint(v: &BigUint) -> Self {
        let words = v.to_u64_digits();
        if words.is_empty() {
            return Real(BigFloat::new(P));
        }
        let mut r = BigFloat::new(P);
        let base = BigFloat::from_u64(2, P).powi(64, P, RM);
        for &w in words.iter().rev() {
            r = r.mul(&base, P, RM).add(&BigFloat::from_u64(w, P), P, RM);
        }
        Real(r)
    }

    pub fn pi() -> Self {
        Real(consts().pi(P, RM))
    }

    pub fn as_big_float(&self) -> &BigFloat {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn ln(&self) -> Self {
        Real(self.0.ln(P, RM, &mut consts()))
    }

    pub fn add(&self, o: &Real) -> Self {
        Real(self.0.add(&o.0, P, RM))
    }

    pub fn sub(&self, o: &Real) -> Self {
        Real(self.0.sub(&o.0, P, RM))
    }

    pub fn mul(&self, o: &Real) -> Self {
        Real(self.0.mul(&o.0, P, RM))
    }

    pub fn div(&self, o: &Real) -> Self {
        Real(self.0.div(&o.0, P, RM))
    }

    pub fn abs(&self) -> Self {
        Real(self.0.abs())
    }

    pub fn sqrt(&self) -> Self {
        Real(self.0.sqrt(P, RM))
    }

    /// `|self - other| / |other|`, or `|self|` when `other` is zero.
    pub fn relative_error(&self, other: &Real) -> f64 {
        let diff = self.sub(other).abs();
        if other.is_zero() {
            diff.to_f64()
        } else {
            diff.div(&other.abs()).to_f64()
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        self.scientific().parse().expect("decimal rendering parses as f64")
    }

    fn scientific(&self) -> String {
        self.0.format(Radix::Dec, RM, &mut consts()).expect("finite value formats")
    }

    /// Plain positional notation with `sig` significant digits, rounded
    /// half-up on the decimal expansion.
    pub fn to_plain(&self, sig: usize) -> String {
        let sig = sig.max(1);
        if self.0.is_zero() {
            return "0".to_owned();
        }
        let sci = self.scientific();
        let (mantissa, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
        let exp: i64 = exp.parse().expect("decimal exponent");
        let negative = mantissa.starts_with('-');
        let mut digits: Vec<u8> = mantissa.bytes().filter(u8::is_ascii_digit).map(|b| b - b'0').collect();
        // position of the decimal point after the first digit
        let mut point = exp + 1;
        if digits.len() > sig {
            let round_up = digits[sig] >= 5;
            digits.truncate(sig);
            if round_up {
                let mut i = sig;
                loop {
                    if i == 0 {
                        digits.insert(0, 1);
                        digits.truncate(sig);
                        point += 1;
                        break;
                    }
                    i -= 1;
                    if digits[i] == 9 {
                        digits[i] = 0;
                    } else {
                        digits[i] += 1;
                        break;
                    }
                }
            }
        }
        let body: String = digits.iter().map(|d| char::from(b'0' + d)).collect();
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        if point <= 0 {
            out.push_str("0.");
            out.extend(std::iter::repeat_n('0', (-point) as usize));
            out.push_str(&body);
        } else if point as usize >= body.len() {
            out.push_str(&body);
            out.extend(std::iter::repeat_n('0', point as usize - body.len()));
        } else {
            out.push_str(&body[..point as usize]);
            out.push('.');
            out.push_str(&body[point as usize..]);
        }
        out
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_plain(f.precision().unwrap_or(30)))
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.to_plain(30))
    }
}

/// Catalan's constant from
///
/// ```text
/// G = (pi/8) ln(2 + sqrt 3) + (3/8) sum_{k>=0} 1 / ((2k+1)^2 C(2k,k))
/// ```
///
/// Successive terms shrink by at least a factor 3 from `k = 1` on, so the
/// tail after the last term used is below half that term; summation stops
/// once a term falls under `2^-(PRECISION_BITS + 16)`.
pub fn catalan() -> Real {
    let mut cc = consts();
    let one = BigFloat::from_u64(1, P);
    let cutoff = BigFloat::from_u64(2, P).powi(P + 16, P, RM).reciprocal(P, RM);

    let mut term = one.clone();
    let mut sum = one.clone();
    let mut k: u64 = 1;
    loop {
        // t_k = t_{k-1} * k (2k - 1) / (2 (2k + 1)^2)
        let num = BigFloat::from_u64(k * (2 * k - 1), P);
        let den = BigFloat::from_u64(2 * (2 * k + 1) * (2 * k + 1), P);
        term = term.mul(&num, P, RM).div(&den, P, RM);
        sum = sum.add(&term, P, RM);
        if term.cmp(&cutoff) == Some(-1) {
            break;
        }
        k += 1;
    }

    let three = BigFloat::from_u64(3, P);
    let eight = BigFloat::from_u64(8, P);
    let log_term = BigFloat::from_u64(2, P).add(&three.sqrt(P, RM), P, RM).ln(P, RM, &mut cc);
    let pi = cc.pi(P, RM);
    let head = pi.mul(&log_term, P, RM).div(&eight, P, RM);
    let tail = three.mul(&sum, P, RM).div(&eight, P, RM);
    Real(head.add(&tail, P, RM))
}

/// The square-lattice dimer entropy per site, `G / pi = 0.29156090403...`.
pub fn lambda2_exact() -> Real {
    catalan().div(&Real::pi())
}

/// Number of dimer coverings of the free `m x n` grid from the product
///
/// ```text
/// prod_{j=1..m} prod_{k=1..n} (4 cos^2(pi j/(m+1)) + 4 cos^2(pi k/(n+1)))^(1/4)
/// ```
///
/// When `m` and `n` are both odd one factor vanishes exactly and the result
/// is zero.
pub fn kasteleyn_count_2d(m: usize, n: usize) -> Real {
    assert!(m >= 1 && n >= 1, "grid sides must be positive");
    if m % 2 == 1 && n % 2 == 1 {
        return Real(BigFloat::new(P));
    }
    let mut cc = consts();
    let pi = cc.pi(P, RM);
    let four = BigFloat::from_u64(4, P);
    let cos_sq = |i: usize, len: usize, cc: &mut Consts| {
        let angle = pi.mul(&BigFloat::from_u64(i as u64, P), P, RM).div(&BigFloat::from_u64(len as u64 + 1, P), P, RM);
        let c = angle.cos(P, RM, cc);
        four.mul(&c.mul(&c, P, RM), P, RM)
    };
    let rows: Vec<BigFloat> = (1..=m).map(|j| cos_sq(j, m, &mut cc)).collect();
    let cols: Vec<BigFloat> = (1..=n).map(|k| cos_sq(k, n, &mut cc)).collect();

    let mut product = BigFloat::from_u64(1, P);
    for r in &rows {
        for c in &cols {
            product = product.mul(&r.add(c, P, RM), P, RM);
        }
    }
    Real(product.sqrt(P, RM).sqrt(P, RM))
}
