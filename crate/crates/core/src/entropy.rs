//! Finite-size dimer entropies `ln(count) / V`.

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::count::{transfer_matrix_count, CountConfig, CountError, MatchCount};
use crate::lattice::{Boundary, LatticeError, LatticeSpec};
use crate::precise::Real;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EntropyError {
    #[error(transparent)]
    Count(#[from] CountError),
    #[error("{0} has no perfect matching")]
    NoPerfectMatching(String),
}

impl From<LatticeError> for EntropyError {
    fn from(e: LatticeError) -> Self {
        EntropyError::Count(e.into())
    }
}

fn spec_dims<S: Serializer>(spec: &LatticeSpec, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&spec.dims())
}

/// Entropy per site of one finite lattice.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaSample {
    #[serde(rename = "dims", serialize_with = "spec_dims")]
    pub spec: LatticeSpec,
    pub boundary: Boundary,
    pub sites: usize,
    pub count: MatchCount,
    pub lambda: Real,
}

impl LambdaSample {
    /// Builds a sample from a known non-zero count.
    pub fn from_count(spec: LatticeSpec, count: MatchCount) -> Result<Self, EntropyError> {
        if count.is_zero() {
            return Err(EntropyError::NoPerfectMatching(spec.to_string()));
        }
        let sites = spec.site_count();
        let lambda = Real::from_biguint(count.value()).ln().div(&Real::from_u64(sites as u64));
        Ok(LambdaSample { boundary: spec.boundary(), spec, sites, count, lambda })
    }
}

/// `ln(count) / V` with the count from the transfer matrix.
pub fn lambda_finite(spec: &LatticeSpec, config: &CountConfig) -> Result<LambdaSample, EntropyError> {
    let count = transfer_matrix_count(spec, config)?;
    LambdaSample::from_count(spec.clone(), count)
}

/// A scanned lattice that could not produce a sample.
#[derive(Debug, Clone, Serialize)]
pub struct ScanSkip {
    #[serde(rename = "dims", serialize_with = "spec_dims")]
    pub spec: LatticeSpec,
    pub sites: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ScanOutcome {
    /// Successful samples, ordered by site count.
    pub samples: Vec<LambdaSample>,
    /// Lattices over the state budget or otherwise uncountable.
    pub errors: Vec<ScanSkip>,
    /// Odd site counts, which have no coverings.
    pub skipped: Vec<ScanSkip>,
}

/// The lattices a scan visits: `n` for d = 1, `n x n` for d = 2, and
/// ladders `n x .. x n x m` with `m >= n` for d >= 3. Sides start at 2 for
/// free boundaries and 3 for periodic ones.
pub fn scan_specs(d: usize, boundary: Boundary, max_side: usize) -> Result<Vec<LatticeSpec>, LatticeError> {
    if d == 0 {
        return Err(LatticeError::NoAxes);
    }
    let lo = match boundary {
        Boundary::Free => 2,
        Boundary::Periodic => 3,
    };
    let mut specs = Vec::new();
    for n in lo..=max_side {
        match d {
            1 | 2 => specs.push(LatticeSpec::new(vec![n; d], boundary)?),
            _ => {
                for m in n..=max_side {
                    let mut sides = vec![n; d - 1];
                    sides.push(m);
                    specs.push(LatticeSpec::new(sides, boundary)?);
                }
            }
        }
    }
    specs.sort_by_key(|s| (s.site_count(), s.sides().to_vec()));
    Ok(specs)
}

/// Finite-size entropies over a family of growing lattices. Per-lattice
/// failures are recorded, not propagated.
pub fn lambda_scan(
    d: usize,
    boundary: Boundary,
    max_side: usize,
    config: &CountConfig,
) -> Result<ScanOutcome, EntropyError> {
    let mut out = ScanOutcome::default();
    for spec in scan_specs(d, boundary, max_side)? {
        let sites = spec.site_count();
        if sites % 2 == 1 {
            out.skipped.push(ScanSkip { spec, sites, reason: "odd site count".into() });
            continue;
        }
        match lambda_finite(&spec, config) {
            Ok(sample) => out.samples.push(sample),
            Err(e) => out.errors.push(ScanSkip { spec, sites, reason: e.to_string() }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> CountConfig {
        CountConfig::default()
    }

    #[test]
    fn small_samples() {
        let s = lambda_finite(&LatticeSpec::free(&[2, 2]).unwrap(), &cfg()).unwrap();
        assert_eq!(s.sites, 4);
        assert!((s.lambda.to_f64() - 2f64.ln() / 4.0).abs() < 1e-15);

        let s = lambda_finite(&LatticeSpec::free(&[2, 2, 2]).unwrap(), &cfg()).unwrap();
        assert_eq!(s.count.to_string(), "9");
        assert_eq!(s.lambda.to_plain(20), "0.27465307216702742285");

        let s = lambda_finite(&LatticeSpec::free(&[8, 8]).unwrap(), &cfg()).unwrap();
        assert_eq!(s.lambda.to_plain(20), "0.25593123808525714166");
    }

    #[test]
    fn zero_count_is_reported() {
        let err = lambda_finite(&LatticeSpec::free(&[1, 3]).unwrap(), &cfg()).unwrap_err();
        assert!(err.to_string().contains("no perfect matching"));
    }

    #[test]
    fn scan_two_d() {
        let out = lambda_scan(2, Boundary::Free, 8, &cfg()).unwrap();
        let sides: Vec<usize> = out.samples.iter().map(|s| s.spec.sides()[0]).collect();
        assert_eq!(sides, [2, 4, 6, 8]);
        assert!(out.samples.windows(2).all(|w| w[0].lambda < w[1].lambda));
        assert_eq!(out.skipped.len(), 3);
        assert!(out.errors.is_empty());

        let out = lambda_scan(2, Boundary::Free, 2, &cfg()).unwrap();
        assert_eq!(out.samples.len(), 1);
    }

    #[test]
    fn scan_three_d() {
        let out = lambda_scan(3, Boundary::Free, 2, &cfg()).unwrap();
        assert_eq!(out.samples.len(), 1);
        assert_eq!(out.samples[0].spec.dims(), "2x2x2");
        assert_eq!(out.samples[0].lambda.to_plain(5), "0.27465");
    }

    #[test]
    fn scan_records_budget_errors_and_continues() {
        let out = lambda_scan(3, Boundary::Free, 4, &CountConfig::with_budget(8)).unwrap();
        assert!(out.errors.iter().any(|e| e.spec.dims() == "4x4x4"));
        assert!(out.samples.iter().any(|s| s.spec.dims() == "2x2x4"));
        let v: Vec<usize> = out.samples.iter().map(|s| s.sites).collect();
        assert!(v.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn scan_periodic_starts_at_three() {
        let specs = scan_specs(2, Boundary::Periodic, 4).unwrap();
        assert_eq!(specs.iter().map(LatticeSpec::dims).collect::<Vec<_>>(), ["3x3", "4x4"]);
        assert!(scan_specs(0, Boundary::Free, 4).is_err());
    }
}
