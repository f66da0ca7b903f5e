//! Exact perfect-matching (dimer covering) counts.
//!
//! Two engines share one contract. [`brute_force_count`] enumerates
//! coverings directly and is only used as an oracle on small boxes.
//! [`transfer_matrix_count`] sweeps the box site by site along the last
//! axis, carrying a bitmask of the next `A` sites (one cross-section) that
//! are already covered by dimers reaching forward from earlier sites.
//!
//! Wraparound edges inside a cross-section always point at most `A - 1`
//! sites ahead, so they live inside the window. Wraparound edges along the
//! last axis join layer 0 to the final layer; they are handled by fixing
//! the set of sites on that seam, running one sweep per seam set and
//! summing.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::lattice::{Boundary, LatticeError, LatticeSpec};

/// Largest box the brute-force engine accepts.
pub const BRUTE_FORCE_MAX_SITES: usize = 36;

/// Default bound on frontier states, as a power of two.
pub const DEFAULT_STATE_BUDGET_EXP: u32 = 24;

/// Environment variable overriding [`DEFAULT_STATE_BUDGET_EXP`].
pub const STATE_BUDGET_ENV: &str = "DIMER_STATE_BUDGET";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("{sites} sites is too many for brute force (limit {limit}); use the transfer-matrix engine")]
    TooLargeForBruteForce { sites: usize, limit: usize },
    #[error("{spec} needs 2^{needed} frontier states, over the budget of 2^{budget}")]
    StateBudgetExceeded { spec: String, needed: u32, budget: u32 },
    #[error("invalid state budget {0:?}: expected an integer exponent between 1 and 40")]
    BadBudget(String),
}

/// Tuning for [`transfer_matrix_count`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountConfig {
    /// A sweep may use at most `2^state_budget_exp` frontier states.
    pub state_budget_exp: u32,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig { state_budget_exp: DEFAULT_STATE_BUDGET_EXP }
    }
}

impl CountConfig {
    pub fn with_budget(state_budget_exp: u32) -> Self {
        CountConfig { state_budget_exp }
    }

    /// Default config, with the budget taken from `DIMER_STATE_BUDGET` when set.
    pub fn from_env() -> Result<Self, CountError> {
        match std::env::var(STATE_BUDGET_ENV) {
            Ok(v) => Self::parse_budget(&v),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn parse_budget(text: &str) -> Result<Self, CountError> {
        match text.trim().parse::<u32>() {
            Ok(exp @ 1..=40) => Ok(Self::with_budget(exp)),
            _ => Err(CountError::BadBudget(text.to_owned())),
        }
    }

    /// Exponent of the state space a sweep of `spec` would need.
    pub fn states_needed(spec: &LatticeSpec) -> u32 {
        let a = spec.cross_section().min(u32::MAX as usize / 2) as u32;
        match spec.boundary() {
            Boundary::Free => a,
            // one sweep per seam set
            Boundary::Periodic => 2 * a,
        }
    }

    fn check(&self, spec: &LatticeSpec) -> Result<(), CountError> {
        let needed = Self::states_needed(spec);
        if needed > self.state_budget_exp {
            return Err(CountError::StateBudgetExceeded {
                spec: spec.to_string(),
                needed,
                budget: self.state_budget_exp,
            });
        }
        Ok(())
    }
}

/// An exact count of perfect matchings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MatchCount(BigUint);

impl MatchCount {
    pub fn new(value: BigUint) -> Self {
        MatchCount(value)
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        Zero::is_zero(&self.0)
    }

    pub fn to_u128(&self) -> Option<u128> {
        self.0.to_u128()
    }
}

impl From<u64> for MatchCount {
    fn from(v: u64) -> Self {
        MatchCount(BigUint::from(v))
    }
}

impl fmt::Display for MatchCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl Serialize for MatchCount {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

/// Counts coverings by recursive enumeration: cover the lowest uncovered
/// site with each available neighbour in turn.
pub fn brute_force_count(spec: &LatticeSpec) -> Result<MatchCount, CountError> {
    let n = spec.site_count();
    if n > BRUTE_FORCE_MAX_SITES {
        return Err(CountError::TooLargeForBruteForce { sites: n, limit: BRUTE_FORCE_MAX_SITES });
    }
    if n % 2 == 1 {
        return Ok(MatchCount::default());
    }
    let adj: Vec<u64> = spec.adjacency().iter().map(|ns| ns.iter().fold(0u64, |m, &j| m | 1 << j)).collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

    fn go(adj: &[u64], full: u64, covered: u64) -> u64 {
        if covered == full {
            return 1;
        }
        let site = (!covered).trailing_zeros() as usize;
        let mut free = adj[site] & !covered;
        let mut total = 0;
        while free != 0 {
            let partner = free.trailing_zeros();
            free &= free - 1;
            total += go(adj, full, covered | 1 << site | 1 << partner);
        }
        total
    }

    Ok(MatchCount::from(go(&adj, full, 0)))
}

/// Counts coverings with the layer-by-layer transfer matrix.
pub fn transfer_matrix_count(spec: &LatticeSpec, config: &CountConfig) -> Result<MatchCount, CountError> {
    config.check(spec)?;
    if spec.site_count() % 2 == 1 {
        return Ok(MatchCount::default());
    }
    let sweep = Sweep::new(spec);
    let count = match spec.boundary() {
        Boundary::Free => sweep.count(0),
        Boundary::Periodic => (0..1u64 << sweep.width)
            .into_par_iter()
            .map(|seam| sweep.count(seam))
            .reduce(<BigUint as Zero>::zero, |a, b| a + b),
    };
    Ok(MatchCount(count))
}

/// Running totals for the sweep. `u128` is tried first and the sweep is
/// repeated with `BigUint` if it overflows.
trait Tally: Clone + Send {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&mut self, other: &Self) -> Option<()>;
    fn into_big(self) -> BigUint;
}

impl Tally for u128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add(&mut self, other: &Self) -> Option<()> {
        *self = self.checked_add(*other)?;
        Some(())
    }
    fn into_big(self) -> BigUint {
        BigUint::from(self)
    }
}

impl Tally for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&mut self, other: &Self) -> Option<()> {
        *self += other;
        Some(())
    }
    fn into_big(self) -> BigUint {
        self
    }
}

struct Sweep {
    /// Window width, the cross-section size `A`.
    width: usize,
    layers: usize,
    /// In-layer forward partner offsets for each position in a layer.
    offsets: Vec<Vec<usize>>,
}

impl Sweep {
    fn new(spec: &LatticeSpec) -> Self {
        let width = spec.cross_section();
        let strides = spec.strides();
        let cross_axes = spec.dimension() - 1;
        let periodic = spec.boundary() == Boundary::Periodic;
        let offsets = (0..width)
            .map(|j| {
                let mut offs = Vec::new();
                for (&len, &stride) in spec.sides()[..cross_axes].iter().zip(&strides) {
                    let coord = (j / stride) % len;
                    if coord + 1 < len {
                        offs.push(stride);
                    }
                    if periodic && coord == 0 {
                        offs.push((len - 1) * stride);
                    }
                }
                offs
            })
            .collect();
        Sweep { width, layers: spec.layers(), offsets }
    }

    fn count(&self, seam: u64) -> BigUint {
        match self.run::<u128>(seam) {
            Some(c) => c.into_big(),
            None => self.run::<BigUint>(seam).expect("BigUint does not overflow").into_big(),
        }
    }

    /// One sweep with the seam set `seam` pre-covered in the first and last
    /// layers. Returns `None` on overflow.
    fn run<T: Tally>(&self, seam: u64) -> Option<T> {
        let size = 1usize << self.width;
        let mut cur = vec![T::zero(); size];
        let mut next = vec![T::zero(); size];
        cur[seam as usize] = T::one();

        for layer in 0..self.layers {
            let last = layer + 1 == self.layers;
            if last && seam != 0 {
                for (mask, c) in cur.iter_mut().enumerate() {
                    if !c.is_zero() && mask as u64 & seam == 0 {
                        next[mask | seam as usize] = std::mem::replace(c, T::zero());
                    } else {
                        *c = T::zero();
                    }
                }
                std::mem::swap(&mut cur, &mut next);
            }
            for offs in &self.offsets {
                for mask in 0..size {
                    if cur[mask].is_zero() {
                        continue;
                    }
                    let c = std::mem::replace(&mut cur[mask], T::zero());
                    if mask & 1 == 1 {
                        next[mask >> 1].add(&c)?;
                        continue;
                    }
                    for &off in offs {
                        if mask >> off & 1 == 0 {
                            next[(mask | 1 << off) >> 1].add(&c)?;
                        }
                    }
                    if !last {
                        next[(mask | 1 << self.width) >> 1].add(&c)?;
                    }
                }
                std::mem::swap(&mut cur, &mut next);
            }
        }
        Some(std::mem::replace(&mut cur[0], T::zero()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free(s: &[usize]) -> LatticeSpec {
        LatticeSpec::free(s).unwrap()
    }

    fn tm(spec: &LatticeSpec) -> u128 {
        transfer_matrix_count(spec, &CountConfig::default()).unwrap().to_u128().unwrap()
    }

    fn bf(spec: &LatticeSpec) -> u128 {
        brute_force_count(spec).unwrap().to_u128().unwrap()
    }

    #[test]
    fn brute_force_small_cases() {
        assert_eq!(bf(&free(&[2, 2])), 2);
        assert_eq!(bf(&free(&[1, 3])), 0);
        assert_eq!(bf(&free(&[2, 3])), 3);
        assert_eq!(bf(&free(&[2, 2, 2])), 9);
        assert_eq!(bf(&free(&[1, 1])), 0);
        assert_eq!(bf(&free(&[1, 2])), 1);
        assert_eq!(bf(&free(&[6, 6])), 6728);
    }

    #[test]
    fn brute_force_guard() {
        let err = brute_force_count(&free(&[6, 7])).unwrap_err();
        assert!(matches!(err, CountError::TooLargeForBruteForce { sites: 42, limit: 36 }));
        assert!(err.to_string().contains("transfer-matrix"));
    }

    #[test]
    fn transfer_matrix_small_cases() {
        assert_eq!(tm(&free(&[2, 2])), 2);
        assert_eq!(tm(&free(&[2, 3])), 3);
        assert_eq!(tm(&free(&[3, 2])), 3);
        assert_eq!(tm(&free(&[2, 2, 2])), 9);
        assert_eq!(tm(&free(&[8, 8])), 12988816);
        assert_eq!(tm(&free(&[1])), 0);
        assert_eq!(tm(&free(&[2])), 1);
        assert_eq!(tm(&free(&[1, 1, 4])), 1);
    }

    #[test]
    fn overflow_falls_back_to_big_integers() {
        let spec = free(&[12, 32]);
        let sweep = Sweep::new(&spec);
        assert!(sweep.run::<u128>(0).is_none());
        let c = transfer_matrix_count(&spec, &CountConfig::default()).unwrap();
        assert!(c.to_u128().is_none());

        let sweep = Sweep::new(&free(&[6, 8]));
        assert_eq!(sweep.run::<u128>(0).unwrap().into_big(), sweep.run::<BigUint>(0).unwrap());
    }

    #[test]
    fn periodic_matches_brute_force() {
        for sides in [&[3, 4][..], &[4, 4], &[4, 3], &[3, 6], &[5, 4], &[4, 6], &[3, 3, 4], &[4, 3, 3]] {
            let spec = LatticeSpec::periodic(sides).unwrap();
            assert_eq!(tm(&spec), bf(&spec), "{spec}");
        }
    }

    #[test]
    fn known_torus_counts() {
        // 4x4 torus: 272 coverings
        assert_eq!(tm(&LatticeSpec::periodic(&[4, 4]).unwrap()), 272);
        assert_eq!(tm(&LatticeSpec::periodic(&[3, 3]).unwrap()), 0);
    }

    #[test]
    fn budget() {
        let spec = free(&[5, 5, 2]);
        let err = transfer_matrix_count(&spec, &CountConfig::with_budget(24)).unwrap_err();
        assert!(matches!(err, CountError::StateBudgetExceeded { needed: 25, budget: 24, .. }));
        assert!(transfer_matrix_count(&spec, &CountConfig::with_budget(4)).is_err());
        assert!(transfer_matrix_count(&free(&[4, 4]), &CountConfig::with_budget(4)).is_ok());
        let torus = LatticeSpec::periodic(&[4, 4]).unwrap();
        assert_eq!(CountConfig::states_needed(&torus), 8);
        assert!(transfer_matrix_count(&torus, &CountConfig::with_budget(7)).is_err());
    }

    #[test]
    fn budget_parsing() {
        assert_eq!(CountConfig::parse_budget("20").unwrap().state_budget_exp, 20);
        assert!(CountConfig::parse_budget("0").is_err());
        assert!(CountConfig::parse_budget("lots").is_err());
    }
}
