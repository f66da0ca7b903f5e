//! Finite hypercubic boxes and tori.
//!
//! Sites are numbered with the last axis slowest: a site's index is
//! `layer * cross_section + c`, where `layer` is its coordinate on the last
//! axis and `c` is the row-major index of its remaining coordinates.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Free,
    Periodic,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Free => "free",
            Boundary::Periodic => "periodic",
        })
    }
}

impl FromStr for Boundary {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "free" => Ok(Boundary::Free),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(format!("unknown boundary {other:?} (expected free or periodic)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("a lattice needs at least one axis")]
    NoAxes,
    #[error("side {axis} has length 0")]
    EmptySide { axis: usize },
    #[error("periodic axis {axis} has length {len}; wrapped axes need at least 3 sites")]
    ShortPeriodicSide { axis: usize, len: usize },
    #[error("site count overflows")]
    TooManySites,
    #[error("cannot parse dimensions {0:?}: expected positive integers joined by 'x', e.g. 4x4x6")]
    BadDims(String),
}

/// An `L_1 x .. x L_d` box with one boundary condition for every axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeSpec {
    sides: Vec<usize>,
    boundary: Boundary,
}

impl LatticeSpec {
    pub fn new(sides: Vec<usize>, boundary: Boundary) -> Result<Self, LatticeError> {
        if sides.is_empty() {
            return Err(LatticeError::NoAxes);
        }
        for (axis, &len) in sides.iter().enumerate() {
            if len == 0 {
                return Err(LatticeError::EmptySide { axis });
            }
            if boundary == Boundary::Periodic && len < 3 {
                return Err(LatticeError::ShortPeriodicSide { axis, len });
            }
        }
        sides.iter().try_fold(1usize, |acc, &l| acc.checked_mul(l)).ok_or(LatticeError::TooManySites)?;
        Ok(LatticeSpec { sides, boundary })
    }

    pub fn free(sides: &[usize]) -> Result<Self, LatticeError> {
        Self::new(sides.to_vec(), Boundary::Free)
    }

    pub fn periodic(sides: &[usize]) -> Result<Self, LatticeError> {
        Self::new(sides.to_vec(), Boundary::Periodic)
    }

    /// Parses `"8x8"`, `"2x2x2"` and similar.
    pub fn parse_dims(dims: &str, boundary: Boundary) -> Result<Self, LatticeError> {
        let sides = dims
            .split(['x', 'X'])
            .map(|s| s.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| LatticeError::BadDims(dims.to_owned()))?;
        Self::new(sides, boundary)
    }

    pub fn dimension(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[usize] {
        &self.sides
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn site_count(&self) -> usize {
        self.sides.iter().product()
    }

    /// Number of sites in one layer perpendicular to the last axis.
    pub fn cross_section(&self) -> usize {
        self.sides[..self.sides.len() - 1].iter().product()
    }

    pub fn layers(&self) -> usize {
        *self.sides.last().unwrap()
    }

    /// Index step along each axis.
    pub fn strides(&self) -> Vec<usize> {
        let d = self.sides.len();
        let mut strides = vec![0; d];
        let mut s = 1;
        for axis in (0..d - 1).rev() {
            strides[axis] = s;
            s *= self.sides[axis];
        }
        strides[d - 1] = s;
        strides
    }

    /// `"4x4x6"`.
    pub fn dims(&self) -> String {
        self.sides.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
    }

    /// All neighbours of every site, ascending and without duplicates.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let strides = self.strides();
        let n = self.site_count();
        let mut adj = vec![Vec::new(); n];
        for site in 0..n {
            for (axis, (&len, &stride)) in self.sides.iter().zip(&strides).enumerate() {
                let coord = self.coord(site, axis, &strides);
                if coord + 1 < len {
                    adj[site].push(site + stride);
                    adj[site + stride].push(site);
                } else if self.boundary == Boundary::Periodic {
                    let wrapped = site - coord * stride;
                    adj[site].push(wrapped);
                    adj[wrapped].push(site);
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    fn coord(&self, site: usize, axis: usize, strides: &[usize]) -> usize {
        (site / strides[axis]) % self.sides[axis]
    }

    /// The same lattice with its axes reordered: axis `i` of the result is
    /// axis `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        LatticeSpec { sides: perm.iter().map(|&i| self.sides[i]).collect(), boundary: self.boundary }
    }
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.dims(), self.boundary)
    }
}
