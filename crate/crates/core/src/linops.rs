//! Linear maps `A: R^d -> R^d'` with exact adjoints and certified operator-norm bounds.
//!
//! Every operator is immutable after construction. `apply` and `adjoint` are pure and
//! check the input length; the `_into` variants write into a caller-provided buffer and
//! are what the solver uses on its hot path.

use std::io::Read;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::vecops::{norm2, norm2_sq};

/// Seed of the starting vector used by every power iteration.
pub const POWER_ITERATION_SEED: u64 = 0x0005_eed0_fa11;

/// Multiplier applied to a converged power-iteration estimate.
pub const CONVERGED_SAFETY: f64 = 1.01;

/// Multiplier applied when power iteration runs out of iterations.
pub const LOOSE_SAFETY: f64 = 1.05;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(
                "dense matrix must have positive dimensions".into(),
            ));
        }
        check_len("dense matrix data", rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            check_len("dense matrix row", cols, row.len())?;
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let mut data = vec![0.0; n * n];
        for (i, v) in values.iter().enumerate() {
            data[i * n + i] = *v;
        }
        Self::new(n, n, data)
    }

    /// Reads a header-free, row-major CSV of numbers.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let row = record
                .iter()
                .map(|field| {
                    field.parse::<f64>().map_err(|e| {
                        Error::InvalidParameter(format!("bad matrix entry {field:?}: {e}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }
}

/// Boundary handling for [`Conv2d`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Periodic,
    /// Same-size output, pixels outside the image read as zero.
    Zero,
}

/// Convolution kernel as it appears in JSON configs: row-major data plus `[rows, cols]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub shape: [usize; 2],
    pub data: Vec<f64>,
}

/// Same-size 2D convolution of an `height x width` row-major image.
///
/// The kernel is anchored at `(rows / 2, cols / 2)`; the adjoint is correlation with the
/// same kernel (convolution with the flipped kernel).
#[derive(Debug, Clone, PartialEq)]
pub struct Conv2d {
    height: usize,
    width: usize,
    krows: usize,
    kcols: usize,
    kernel: Vec<f64>,
    boundary: Boundary,
}

impl Conv2d {
    pub fn new(
        height: usize,
        width: usize,
        kernel: &KernelSpec,
        boundary: Boundary,
    ) -> Result<Self> {
        let [krows, kcols] = kernel.shape;
        if height == 0 || width == 0 || krows == 0 || kcols == 0 {
            return Err(Error::InvalidParameter(
                "image and kernel dimensions must be positive".into(),
            ));
        }
        check_len("kernel data", krows * kcols, kernel.data.len())?;
        if krows > height || kcols > width {
            return Err(Error::InvalidParameter(format!(
                "kernel {krows}x{kcols} is larger than image {height}x{width}"
            )));
        }
        if !kernel.data.iter().all(|k| k.is_finite()) {
            return Err(Error::InvalidParameter("kernel has non-finite entries".into()));
        }
        Ok(Self {
            height,
            width,
            krows,
            kcols,
            kernel: kernel.data.clone(),
            boundary,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    fn source(&self, i: usize, a: usize, n: usize, center: usize, forward: bool) -> Option<usize> {
        // forward: i - a + center; adjoint: i + a - center
        let shifted = if forward {
            i as isize - a as isize + center as isize
        } else {
            i as isize + a as isize - center as isize
        };
        match self.boundary {
            Boundary::Periodic => Some(shifted.rem_euclid(n as isize) as usize),
            Boundary::Zero => (0..n as isize).contains(&shifted).then_some(shifted as usize),
        }
    }

    fn correlate(&self, x: &[f64], out: &mut [f64], forward: bool) {
        let (h, w) = (self.height, self.width);
        let (ch, cw) = (self.krows / 2, self.kcols / 2);
        for i in 0..h {
            for j in 0..w {
                let mut acc = 0.0;
                for a in 0..self.krows {
                    let Some(si) = self.source(i, a, h, ch, forward) else {
                        continue;
                    };
                    for b in 0..self.kcols {
                        let Some(sj) = self.source(j, b, w, cw, forward) else {
                            continue;
                        };
                        acc += self.kernel[a * self.kcols + b] * x[si * w + sj];
                    }
                }
                out[i * w + j] = acc;
            }
        }
    }
}

/// Forward-difference image gradient with Neumann boundary.
///
/// Output is interleaved per pixel: `out[2p] = horizontal difference`,
/// `out[2p + 1] = vertical difference`, so a group-l2,1 norm with group size 2 is
/// isotropic total variation. Differences across the last column / last row are zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grad2d {
    height: usize,
    width: usize,
}

impl Grad2d {
    pub fn new(height: usize, width: usize) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidParameter(
                "image dimensions must be positive".into(),
            ));
        }
        Ok(Self { height, width })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    fn forward(&self, x: &[f64], out: &mut [f64]) {
        let (h, w) = (self.height, self.width);
        for i in 0..h {
            for j in 0..w {
                let p = i * w + j;
                out[2 * p] = if j + 1 < w { x[p + 1] - x[p] } else { 0.0 };
                out[2 * p + 1] = if i + 1 < h { x[p + w] - x[p] } else { 0.0 };
            }
        }
    }

    // negative divergence
    fn backward(&self, y: &[f64], out: &mut [f64]) {
        let (h, w) = (self.height, self.width);
        out.iter_mut().for_each(|o| *o = 0.0);
        for i in 0..h {
            for j in 0..w {
                let p = i * w + j;
                if j + 1 < w {
                    out[p + 1] += y[2 * p];
                    out[p] -= y[2 * p];
                }
                if i + 1 < h {
                    out[p + w] += y[2 * p + 1];
                    out[p] -= y[2 * p + 1];
                }
            }
        }
    }
}

/// Operator-norm upper bound together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBound {
    pub value: f64,
    /// Set when power iteration did not reach the requested tolerance.
    pub loose: bool,
}

/// Raw power-iteration result on `A^T A` (no safety factor).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerEstimate {
    pub sigma: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LinearMap {
    Dense(DenseMatrix),
    Conv2d(Conv2d),
    Grad2d(Grad2d),
    Zero { in_dim: usize, out_dim: usize },
    Identity(usize),
    Scaled { factor: f64, inner: Box<LinearMap> },
}

impl LinearMap {
    pub fn zero(in_dim: usize, out_dim: usize) -> Self {
        LinearMap::Zero { in_dim, out_dim }
    }

    pub fn identity(n: usize) -> Self {
        LinearMap::Identity(n)
    }

    pub fn scaled(factor: f64, inner: LinearMap) -> Self {
        LinearMap::Scaled {
            factor,
            inner: Box::new(inner),
        }
    }

    pub fn in_dim(&self) -> usize {
        match self {
            LinearMap::Dense(m) => m.cols,
            LinearMap::Conv2d(c) => c.height * c.width,
            LinearMap::Grad2d(g) => g.height * g.width,
            LinearMap::Zero { in_dim, .. } => *in_dim,
            LinearMap::Identity(n) => *n,
            LinearMap::Scaled { inner, .. } => inner.in_dim(),
        }
    }

    pub fn out_dim(&self) -> usize {
        match self {
            LinearMap::Dense(m) => m.rows,
            LinearMap::Conv2d(c) => c.height * c.width,
            LinearMap::Grad2d(g) => 2 * g.height * g.width,
            LinearMap::Zero { out_dim, .. } => *out_dim,
            LinearMap::Identity(n) => *n,
            LinearMap::Scaled { inner, .. } => inner.out_dim(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            LinearMap::Zero { .. } => true,
            LinearMap::Scaled { factor, inner } => *factor == 0.0 || inner.is_zero(),
            _ => false,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.out_dim()];
        self.apply_into(x, &mut out)?;
        Ok(out)
    }

    pub fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.in_dim()];
        self.adjoint_into(y, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        check_len("apply input", self.in_dim(), x.len())?;
        check_len("apply output", self.out_dim(), out.len())?;
        self.apply_unchecked(x, out);
        Ok(())
    }

    pub fn adjoint_into(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        check_len("adjoint input", self.out_dim(), y.len())?;
        check_len("adjoint output", self.in_dim(), out.len())?;
        self.adjoint_unchecked(y, out);
        Ok(())
    }

    fn apply_unchecked(&self, x: &[f64], out: &mut [f64]) {
        match self {
            LinearMap::Dense(m) => {
                for (r, o) in out.iter_mut().enumerate() {
                    let row = &m.data[r * m.cols..(r + 1) * m.cols];
                    *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
                }
            }
            LinearMap::Conv2d(c) => c.correlate(x, out, true),
            LinearMap::Grad2d(g) => g.forward(x, out),
            LinearMap::Zero { .. } => out.iter_mut().for_each(|o| *o = 0.0),
            LinearMap::Identity(_) => out.copy_from_slice(x),
            LinearMap::Scaled { factor, inner } => {
                inner.apply_unchecked(x, out);
                out.iter_mut().for_each(|o| *o *= factor);
            }
        }
    }

    fn adjoint_unchecked(&self, y: &[f64], out: &mut [f64]) {
        match self {
            LinearMap::Dense(m) => {
                out.iter_mut().for_each(|o| *o = 0.0);
                for (r, yr) in y.iter().enumerate() {
                    let row = &m.data[r * m.cols..(r + 1) * m.cols];
                    for (o, a) in out.iter_mut().zip(row) {
                        *o += a * yr;
                    }
                }
            }
            LinearMap::Conv2d(c) => c.correlate(y, out, false),
            LinearMap::Grad2d(g) => g.backward(y, out),
            LinearMap::Zero { .. } => out.iter_mut().for_each(|o| *o = 0.0),
            LinearMap::Identity(_) => out.copy_from_slice(y),
            LinearMap::Scaled { factor, inner } => {
                inner.adjoint_unchecked(y, out);
                out.iter_mut().for_each(|o| *o *= factor);
            }
        }
    }

    /// Power iteration on `A^T A` from a fixed seeded start vector.
    ///
    /// Stops once the relative change of the singular-value estimate drops below `tol`.
    pub fn power_iteration(&self, tol: f64, max_iters: usize) -> PowerEstimate {
        let n = self.in_dim();
        let mut rng = ChaCha8Rng::seed_from_u64(POWER_ITERATION_SEED);
        let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let nx = norm2(&x);
        x.iter_mut().for_each(|xi| *xi /= nx);

        let mut ax = vec![0.0; self.out_dim()];
        let mut atax = vec![0.0; n];
        let mut sigma = 0.0;
        for it in 1..=max_iters {
            self.apply_unchecked(&x, &mut ax);
            self.adjoint_unchecked(&ax, &mut atax);
            // x is unit, so ||A^T A x|| estimates sigma_max^2
            let lam = norm2(&atax);
            let next = lam.sqrt();
            if lam == 0.0 {
                return PowerEstimate {
                    sigma: 0.0,
                    iterations: it,
                    converged: true,
                };
            }
            for (xi, yi) in x.iter_mut().zip(&atax) {
                *xi = yi / lam;
            }
            let change = (next - sigma).abs() / next;
            sigma = next;
            if it > 1 && change < tol {
                return PowerEstimate {
                    sigma,
                    iterations: it,
                    converged: true,
                };
            }
        }
        PowerEstimate {
            sigma,
            iterations: max_iters,
            converged: false,
        }
    }

    /// Upper bound `B >= ||A||` used by the step-size condition.
    ///
    /// Analytic where a closed form exists (`sqrt(8)` for the gradient, `||k||_1` for
    /// convolutions); power iteration with a safety factor otherwise.
    pub fn norm_bound(&self, tol: f64, max_iters: usize) -> Result<NormBound> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
        }
        Ok(match self {
            LinearMap::Zero { .. } => NormBound {
                value: 0.0,
                loose: false,
            },
            LinearMap::Identity(_) => NormBound {
                value: 1.0,
                loose: false,
            },
            LinearMap::Grad2d(_) => NormBound {
                value: 8f64.sqrt(),
                loose: false,
            },
            // Young's inequality: ||k * x||_2 <= ||k||_1 ||x||_2
            LinearMap::Conv2d(c) => NormBound {
                value: c.kernel.iter().map(|k| k.abs()).sum(),
                loose: false,
            },
            LinearMap::Scaled { factor, inner } => {
                let b = inner.norm_bound(tol, max_iters)?;
                NormBound {
                    value: factor.abs() * b.value,
                    loose: b.loose,
                }
            }
            LinearMap::Dense(_) => {
                let est = self.power_iteration(tol, max_iters);
                if est.converged {
                    NormBound {
                        value: est.sigma * CONVERGED_SAFETY,
                        loose: false,
                    }
                } else {
                    NormBound {
                        value: est.sigma * LOOSE_SAFETY,
                        loose: true,
                    }
                }
            }
        })
    }

    /// `norm_bound` with tolerance 1e-10 and 10 000 iterations.
    pub fn default_norm_bound(&self) -> f64 {
        self.norm_bound(1e-10, 10_000)
            .expect("positive tolerance")
            .value
    }

    /// `||A x|| / ||x||`.
    pub fn rayleigh_ratio(&self, x: &[f64]) -> Result<f64> {
        let ax = self.apply(x)?;
        Ok((norm2_sq(&ax) / norm2_sq(x)).sqrt())
    }
}

impl From<DenseMatrix> for LinearMap {
    fn from(m: DenseMatrix) -> Self {
        LinearMap::Dense(m)
    }
}

impl From<Conv2d> for LinearMap {
    fn from(c: Conv2d) -> Self {
        LinearMap::Conv2d(c)
    }
}

impl From<Grad2d> for LinearMap {
    fn from(g: Grad2d) -> Self {
        LinearMap::Grad2d(g)
    }
}
