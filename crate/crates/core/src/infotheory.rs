//! Shannon entropies over three-way contingency cubes and the signed
//! mutual redundancy among three categorical variables.
//!
//! For a joint distribution p(x₁, x₂, x₃) the mutual redundancy is
//!
//! ```text
//! R₁₂₃ = H₁ + H₂ + H₃ − H₁₂ − H₁₃ − H₂₃ + H₁₂₃
//! ```
//!
//! with every entropy in bits, `H = −Σ p·log₂ p`. R₁₂₃ is the negative of
//! the interaction information: it is **negative** when the third variable
//! is synergistically determined by the other two (e.g. an XOR relation)
//! and **positive** when all three variables carry the same information.
//! Zero marginal cells contribute nothing (`0·log 0 := 0`).

use serde::Serialize;

use crate::error::{Error, Result};

/// Probabilities below this threshold are treated as exact zeros when
/// computing entropies, so denormal-range noise cannot inject spurious
/// `p·log p` terms.
const PROB_FLOOR: f64 = 1e-300;

/// A dense 3-way table of non-negative counts (or weights).
///
/// Counts are stored row-major: axis 0 slowest, axis 2 fastest. Counts do
/// not need to be normalised; entropies are computed on `counts / total`.
#[derive(Debug, Clone)]
pub struct ContingencyCube {
    dims: (usize, usize, usize),
    counts: Vec<f64>,
    labels: Option<[Vec<String>; 3]>,
}

impl ContingencyCube {
    /// Build a cube from row-major counts.
    ///
    /// Errors if the length does not match `dims`, any count is negative or
    /// non-finite, or all counts are zero.
    pub fn new(dims: (usize, usize, usize), counts: Vec<f64>) -> Result<Self> {
        let n = dims.0 * dims.1 * dims.2;
        if dims.0 == 0 || dims.1 == 0 || dims.2 == 0 {
            return Err(Error::InvalidParameter(
                "contingency cube dimensions must all be at least 1".into(),
            ));
        }
        if counts.len() != n {
            return Err(Error::InvalidParameter(format!(
                "expected {}x{}x{} = {} counts, got {}",
                dims.0,
                dims.1,
                dims.2,
                n,
                counts.len()
            )));
        }
        if let Some(bad) = counts.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::InvalidInput(format!(
                "contingency counts must be finite and non-negative, found {bad}"
            )));
        }
        if counts.iter().all(|&c| c == 0.0) {
            return Err(Error::InvalidInput(
                "contingency cube has no positive count".into(),
            ));
        }
        Ok(Self {
            dims,
            counts,
            labels: None,
        })
    }

    /// Attach category labels (one list per axis, lengths matching `dims`).
    pub fn with_labels(mut self, labels: [Vec<String>; 3]) -> Result<Self> {
        let want = [self.dims.0, self.dims.1, self.dims.2];
        for (axis, lab) in labels.iter().enumerate() {
            if lab.len() != want[axis] {
                return Err(Error::InvalidParameter(format!(
                    "axis {} has {} categories but {} labels were given",
                    axis,
                    want[axis],
                    lab.len()
                )));
            }
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Aggregate long-format records `(cat1, cat2, cat3, count)` into a
    /// cube. Categories are ordered lexicographically per axis so the same
    /// records always produce the same cube. Duplicate triples are summed.
    pub fn from_long_records(records: &[(String, String, String, f64)]) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyInput("no contingency records".into()));
        }
        let mut axes: [Vec<String>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for (a, b, c, _) in records {
            for (axis, v) in [(0, a), (1, b), (2, c)] {
                if !axes[axis].contains(v) {
                    axes[axis].push(v.clone());
                }
            }
        }
        for axis in &mut axes {
            axis.sort();
        }
        let dims = (axes[0].len(), axes[1].len(), axes[2].len());
        let mut counts = vec![0.0; dims.0 * dims.1 * dims.2];
        for (a, b, c, w) in records {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "count for ({a}, {b}, {c}) must be finite and non-negative, got {w}"
                )));
            }
            let i = axes[0].iter().position(|x| x == a).unwrap();
            let j = axes[1].iter().position(|x| x == b).unwrap();
            let k = axes[2].iter().position(|x| x == c).unwrap();
            counts[(i * dims.1 + j) * dims.2 + k] += w;
        }
        Self::new(dims, counts)?.with_labels(axes)
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn labels(&self) -> Option<&[Vec<String>; 3]> {
        self.labels.as_ref()
    }

    pub fn count(&self, i: usize, j: usize, k: usize) -> f64 {
        self.counts[(i * self.dims.1 + j) * self.dims.2 + k]
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }
}

/// All seven marginal/joint entropies (bits) of a cube plus the signed
/// mutual redundancy `r123`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RedundancyReport {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub h12: f64,
    pub h13: f64,
    pub h23: f64,
    pub h123: f64,
    pub r123: f64,
}

/// Shannon entropy (bits) of the cube's marginal over the given axes.
///
/// `axes` must be a non-empty set of distinct axis indices from {0, 1, 2};
/// the remaining axes are summed out before normalising.
pub fn entropy(cube: &ContingencyCube, axes: &[usize]) -> Result<f64> {
    if axes.is_empty() || axes.len() > 3 {
        return Err(Error::InvalidParameter(
            "entropy needs between one and three axes".into(),
        ));
    }
    let mut seen = [false; 3];
    for &a in axes {
        if a > 2 {
            return Err(Error::InvalidParameter(format!(
                "axis index {a} out of range (cube axes are 0, 1, 2)"
            )));
        }
        if seen[a] {
            return Err(Error::InvalidParameter(format!("axis {a} listed twice")));
        }
        seen[a] = true;
    }

    let marginal = marginalize(cube, &seen);
    Ok(entropy_of_counts(&marginal, cube.total()))
}

/// Compute all entropies of the cube and the mutual redundancy
/// `R₁₂₃ = H₁+H₂+H₃ − H₁₂−H₁₃−H₂₃ + H₁₂₃`.
pub fn mutual_redundancy(cube: &ContingencyCube) -> Result<RedundancyReport> {
    let h1 = entropy(cube, &[0])?;
    let h2 = entropy(cube, &[1])?;
    let h3 = entropy(cube, &[2])?;
    let h12 = entropy(cube, &[0, 1])?;
    let h13 = entropy(cube, &[0, 2])?;
    let h23 = entropy(cube, &[1, 2])?;
    let h123 = entropy(cube, &[0, 1, 2])?;
    Ok(RedundancyReport {
        h1,
        h2,
        h3,
        h12,
        h13,
        h23,
        h123,
        r123: h1 + h2 + h3 - h12 - h13 - h23 + h123,
    })
}

/// Sum out the axes not in `keep`, returning the marginal as a flat vector
/// (kept axes in ascending order, row-major).
fn marginalize(cube: &ContingencyCube, keep: &[bool; 3]) -> Vec<f64> {
    let dims = [cube.dims.0, cube.dims.1, cube.dims.2];
    let kept_dims: Vec<usize> = (0..3).filter(|&a| keep[a]).map(|a| dims[a]).collect();
    let mut out = vec![0.0; kept_dims.iter().product()];

    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                let idx3 = [i, j, k];
                let mut flat = 0;
                for (pos, &a) in (0..3).filter(|&a| keep[a]).collect::<Vec<_>>().iter().enumerate()
                {
                    flat = flat * kept_dims[pos] + idx3[a];
                }
                out[flat] += cube.count(i, j, k);
            }
        }
    }
    out
}

fn entropy_of_counts(counts: &[f64], total: f64) -> f64 {
    let mut h = 0.0;
    for &c in counts {
        let p = c / total;
        if p > PROB_FLOOR {
            h -= p * p.log2();
        }
    }
    h
}
