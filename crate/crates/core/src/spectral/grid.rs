use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform periodic grid on the torus `[0, L)ⁿ`, `n ∈ {2, 3}`.
///
/// Nodes sit at `x_i = i·L/N` on every axis. Flat indices are row-major with
/// axis 0 slowest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n_dims: usize,
    resolution: usize,
    box_length: f64,
}

/// Wavevector data attached to one flat spectral index.
#[derive(Clone, Copy, Debug)]
pub struct Freq {
    /// Signed integer wavenumbers per axis, in `(-N/2, N/2]` except the
    /// Nyquist entry which is stored as `-N/2`.
    pub k: [i64; 3],
    /// Angular wavevector `2πk/L`.
    pub xi: [f64; 3],
    /// `|2πk/L|²`.
    pub xi2: f64,
    /// True if any axis sits at the Nyquist wavenumber.
    pub nyquist: bool,
    /// Per-axis Nyquist flags.
    pub nyquist_axis: [bool; 3],
}

impl Freq {
    pub fn is_zero(&self) -> bool {
        self.k == [0, 0, 0]
    }

    pub fn norm(&self) -> f64 {
        self.xi2.sqrt()
    }
}

impl Grid {
    /// Builds a grid. The resolution must be even, at least 16, and factor
    /// into 2s and 3s (powers of two are the common case).
    pub fn new(n_dims: usize, resolution: usize, box_length: f64) -> Result<Self> {
        if !(2..=3).contains(&n_dims) {
            return Err(Error::InvalidGrid(format!("n_dims must be 2 or 3, got {n_dims}")));
        }
        if resolution < 16 || !resolution.is_multiple_of(2) || !is_smooth_23(resolution) {
            return Err(Error::InvalidGrid(format!(
                "resolution must be even, >= 16 and of the form 2^a 3^b, got {resolution}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!("box length must be positive, got {box_length}")));
        }
        Ok(Self { n_dims, resolution, box_length })
    }

    /// Default resolution: 128 per axis in 2D, 64 in 3D.
    pub fn default_for(n_dims: usize, box_length: f64) -> Result<Self> {
        let res = if n_dims == 3 { 64 } else { 128 };
        Self::new(n_dims, res, box_length)
    }

    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn len(&self) -> usize {
        self.resolution.pow(self.n_dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.resolution as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.n_dims as i32)
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.n_dims as i32)
    }

    /// Same lattice on a box scaled by `factor`.
    pub fn with_box_length(&self, box_length: f64) -> Result<Self> {
        Self::new(self.n_dims, self.resolution, box_length)
    }

    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        let n = self.resolution;
        let mut out = [0usize; 3];
        let mut rem = idx;
        for axis in (0..self.n_dims).rev() {
            out[axis] = rem % n;
            rem /= n;
        }
        out
    }

    pub fn flat_index(&self, multi: [usize; 3]) -> usize {
        let n = self.resolution;
        (0..self.n_dims).fold(0, |acc, axis| acc * n + multi[axis])
    }

    pub fn node(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        let m = self.multi_index(idx);
        let mut x = [0.0; 3];
        for axis in 0..self.n_dims {
            x[axis] = m[axis] as f64 * h;
        }
        x
    }

    pub fn signed_wavenumber(&self, i: usize) -> i64 {
        let n = self.resolution as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn freq(&self, idx: usize) -> Freq {
        let m = self.multi_index(idx);
        let scale = 2.0 * PI / self.box_length;
        let half = (self.resolution / 2) as i64;
        let mut k = [0i64; 3];
        let mut xi = [0.0; 3];
        let mut xi2 = 0.0;
        let mut nyquist_axis = [false; 3];
        for axis in 0..self.n_dims {
            k[axis] = self.signed_wavenumber(m[axis]);
            nyquist_axis[axis] = k[axis] == -half;
            xi[axis] = scale * k[axis] as f64;
            xi2 += xi[axis] * xi[axis];
        }
        let nyquist = nyquist_axis.iter().any(|&b| b);
        Freq { k, xi, xi2, nyquist, nyquist_axis }
    }

    /// Flat index of the wavevector `-k`.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.resolution;
        let m = self.multi_index(idx);
        let mut c = [0usize; 3];
        for axis in 0..self.n_dims {
            c[axis] = (n - m[axis]) % n;
        }
        self.flat_index(c)
    }

    /// Per-axis periodic (minimum-image) displacement `a - b`.
    pub fn torus_delta(&self, a: f64, b: f64) -> f64 {
        let l = self.box_length;
        let mut d = (a - b) % l;
        if d > 0.5 * l {
            d -= l;
        } else if d < -0.5 * l {
            d += l;
        }
        d
    }

    pub fn torus_distance(&self, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        (0..self.n_dims)
            .map(|axis| self.torus_delta(a[axis], b[axis]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

fn is_smooth_23(mut n: usize) -> bool {
    for p in [2, 3] {
        while n.is_multiple_of(p) {
            n /= p;
        }
    }
    n == 1
}
