//! Symmetric 3×3 tensor algebra.
//!
//! Reynolds stresses, anisotropy tensors and strain rates all live in
//! [`SymTensor3`]. The eigensolver is closed-form (trigonometric roots of the
//! deviatoric characteristic polynomial) with a robust eigenvector
//! construction, explicit conventions for degenerate spectra and a Jacobi
//! fallback for nearly spherical tensors that escape the degeneracy test.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{EpfError, Result};

/// Row-major 3×3 matrix. Eigenvector matrices store vectors as columns.
pub type Mat3 = [[f64; 3]; 3];

/// Below this turbulent kinetic energy the anisotropy is undefined and taken as zero.
pub const K_FLOOR: f64 = 1e-14;

/// Realizability tolerance, relative to the tensor magnitude.
pub const REALIZABILITY_EPS: f64 = 1e-10;

/// Relative gap below which two eigenvalues are treated as equal.
pub const DEGENERACY_TOL: f64 = 1e-12;

pub const IDENTITY3: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SymTensor3 {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub xy: f64,
    pub xz: f64,
    pub yz: f64,
}

impl SymTensor3 {
    pub const fn new(xx: f64, yy: f64, zz: f64, xy: f64, xz: f64, yz: f64) -> Self {
        Self { xx, yy, zz, xy, xz, yz }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    }

    pub const fn identity() -> Self {
        Self::diag(1.0, 1.0, 1.0)
    }

    pub const fn diag(a: f64, b: f64, c: f64) -> Self {
        Self::new(a, b, c, 0.0, 0.0, 0.0)
    }

    /// Builds a tensor from the upper triangle of `m`.
    ///
    /// Fails when `m` is not symmetric to within `1e-12` relative.
    pub fn from_matrix(m: &Mat3) -> Result<Self> {
        let scale = m.iter().flatten().fold(0.0_f64, |s, v| s.max(v.abs())).max(1e-300);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            if (m[i][j] - m[j][i]).abs() > 1e-12 * scale {
                return Err(EpfError::NotSymmetric { row: i, col: j });
            }
        }
        Ok(Self::new(m[0][0], m[1][1], m[2][2], m[0][1], m[0][2], m[1][2]))
    }

    pub fn to_matrix(&self) -> Mat3 {
        [
            [self.xx, self.xy, self.xz],
            [self.xy, self.yy, self.yz],
            [self.xz, self.yz, self.zz],
        ]
    }

    /// `v · diag(values) · vᵀ` with `v` holding eigenvectors as columns.
    pub fn from_eigen(values: [f64; 3], v: &Mat3) -> Self {
        let entry = |i: usize, j: usize| (0..3).map(|n| v[i][n] * values[n] * v[j][n]).sum::<f64>();
        Self::new(entry(0, 0), entry(1, 1), entry(2, 2), entry(0, 1), entry(0, 2), entry(1, 2))
    }

    pub fn components(&self) -> [f64; 6] {
        [self.xx, self.yy, self.zz, self.xy, self.xz, self.yz]
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy + self.zz
    }

    pub fn det(&self) -> f64 {
        self.xx * (self.yy * self.zz - self.yz * self.yz) - self.xy * (self.xy * self.zz - self.yz * self.xz)
            + self.xz * (self.xy * self.yz - self.yy * self.xz)
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.components().iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// `(1 - f) * self + f * other`.
    pub fn lerp(&self, other: &Self, f: f64) -> Self {
        *self + (*other - *self) * f
    }

    pub fn deviatoric(&self) -> Self {
        *self - Self::identity() * (self.trace() / 3.0)
    }

    pub fn max_component_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }
}

impl Add for SymTensor3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.xx + o.xx, self.yy + o.yy, self.zz + o.zz, self.xy + o.xy, self.xz + o.xz, self.yz + o.yz)
    }
}

impl Sub for SymTensor3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.xx - o.xx, self.yy - o.yy, self.zz - o.zz, self.xy - o.xy, self.xz - o.xz, self.yz - o.yz)
    }
}

impl Mul<f64> for SymTensor3 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.xx * s, self.yy * s, self.zz * s, self.xy * s, self.xz * s, self.yz * s)
    }
}

impl Neg for SymTensor3 {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

/// Ordered eigenvalues (descending) with eigenvectors as the columns of `vectors`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenDecomposition {
    pub values: [f64; 3],
    pub vectors: Mat3,
}

impl EigenDecomposition {
    pub fn column(&self, n: usize) -> [f64; 3] {
        column(&self.vectors, n)
    }

    pub fn reconstruct(&self) -> SymTensor3 {
        SymTensor3::from_eigen(self.values, &self.vectors)
    }
}

/// Sum over `i, j` of `X_ij Y_ij`.
pub fn frobenius_inner(x: &SymTensor3, y: &SymTensor3) -> f64 {
    x.xx * y.xx + x.yy * y.yy + x.zz * y.zz + 2.0 * (x.xy * y.xy + x.xz * y.xz + x.yz * y.yz)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Constraint {
    /// `τ_αα ≥ 0`
    Diagonal(usize),
    /// `τ_αα τ_ββ ≥ τ_αβ²`
    CauchySchwarz(usize, usize),
    /// `det τ ≥ 0`
    Determinant,
}

impl std::fmt::Display for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        const AXES: [char; 3] = ['x', 'y', 'z'];
        match self {
            Constraint::Diagonal(a) => write!(f, "diagonal[{0}{0}]", AXES[*a]),
            Constraint::CauchySchwarz(a, b) => write!(f, "cauchy-schwarz[{}{}]", AXES[*a], AXES[*b]),
            Constraint::Determinant => write!(f, "determinant"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RealizabilityReport {
    pub is_realizable: bool,
    /// Violated constraints with the magnitude by which each one fails.
    pub violations: Vec<(Constraint, f64)>,
}

/// Checks the three families of Schumann constraints.
///
/// `eps` is relative: diagonal entries are compared against `eps·s`, minors
/// against `eps·s²` and the determinant against `eps·s³`, with `s` the
/// largest absolute component.
pub fn validate_realizability(tau: &SymTensor3, eps: f64) -> RealizabilityReport {
    let m = tau.to_matrix();
    let s = tau.max_abs().max(1e-300);
    let mut violations = Vec::new();

    for a in 0..3 {
        if m[a][a] < -eps * s {
            violations.push((Constraint::Diagonal(a), -m[a][a]));
        }
    }
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let minor = m[a][a] * m[b][b] - m[a][b] * m[a][b];
        if minor < -eps * s * s {
            violations.push((Constraint::CauchySchwarz(a, b), -minor));
        }
    }
    let det = tau.det();
    if det < -eps * s * s * s {
        violations.push((Constraint::Determinant, -det));
    }

    RealizabilityReport { is_realizable: violations.is_empty(), violations }
}

/// Turbulent kinetic energy and anisotropy of a stress tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anisotropy {
    pub k: f64,
    pub a: SymTensor3,
    /// `k ≤ K_FLOOR`; `a` is set to zero.
    pub degenerate: bool,
}

pub fn anisotropy_from_stress(tau: &SymTensor3) -> Anisotropy {
    let k = 0.5 * tau.trace();
    if k <= K_FLOOR {
        return Anisotropy { k, a: SymTensor3::zero(), degenerate: true };
    }
    let a = *tau * (1.0 / k) - SymTensor3::identity() * (2.0 / 3.0);
    Anisotropy { k, a, degenerate: false }
}

pub fn stress_from_anisotropy(k: f64, a: &SymTensor3) -> Result<SymTensor3> {
    if !(k >= 0.0) {
        return Err(EpfError::NegativeEnergy(k));
    }
    if a.trace().abs() > 1e-10 {
        return Err(EpfError::NotTraceless(a.trace()));
    }
    Ok((*a + SymTensor3::identity() * (2.0 / 3.0)) * k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Invariants {
    pub first: f64,
    pub second: f64,
    pub third: f64,
}

/// Trace-form invariants: `tr a`, `-½ tr(a²)` and `det a`.
pub fn invariants(a: &SymTensor3) -> Invariants {
    let tr_a2 = frobenius_inner(a, a);
    Invariants { first: a.trace(), second: -0.5 * tr_a2, third: a.det() }
}

/// Eigenvalue-form invariants of a traceless spectrum.
pub fn invariants_from_eigenvalues(l: &[f64; 3]) -> Invariants {
    Invariants {
        first: l[0] + l[1] + l[2],
        second: l[0] * l[1] + l[0] * l[2] + l[1] * l[2],
        third: l[0] * l[1] * l[2],
    }
}

pub fn eig_sym3(a: &SymTensor3) -> EigenDecomposition {
    let scale = a.max_abs();
    if scale == 0.0 || !scale.is_finite() {
        return EigenDecomposition { values: [0.0; 3], vectors: IDENTITY3 };
    }
    let m = scale_matrix(&a.to_matrix(), 1.0 / scale);

    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    let b = [
        [m[0][0] - q, m[0][1], m[0][2]],
        [m[1][0], m[1][1] - q, m[1][2]],
        [m[2][0], m[2][1], m[2][2] - q],
    ];
    let p2 = (b[0][0] * b[0][0] + b[1][1] * b[1][1] + b[2][2] * b[2][2]
        + 2.0 * (b[0][1] * b[0][1] + b[0][2] * b[0][2] + b[1][2] * b[1][2]))
        / 6.0;
    let p = p2.sqrt();

    let (roots, r) = if p > 0.0 {
        let r = (det3(&scale_matrix(&b, 1.0 / p)) * 0.5).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let hi = q + 2.0 * p * phi.cos();
        let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
        ([hi, 3.0 * q - hi - lo, lo], r)
    } else {
        ([q; 3], 0.0)
    };
    if (roots[0] - roots[2]).abs() < DEGENERACY_TOL * roots.iter().fold(1.0_f64, |s, v| s.max(v.abs())) {
        let mut values = roots.map(|v| v * scale);
        sort_desc(&mut values);
        return EigenDecomposition { values, vectors: IDENTITY3 };
    }

    // The extreme root farthest from the other two is accurate; the close
    // pair comes from an exact 2×2 solve in its orthogonal complement.
    let isolated_high = r >= 0.0;
    let v0 = eigenvector_from_rows(&m, if isolated_high { roots[0] } else { roots[2] });
    let l0 = rayleigh(&m, &v0);
    let ((mu_hi, e_hi), (mu_lo, e_lo)) = complement_pair(&m, &v0);
    let (e_hi, e_lo) = if (mu_hi - mu_lo) < DEGENERACY_TOL * l0.abs().max(mu_hi.abs()).max(mu_lo.abs()).max(1.0) {
        let [g1, g2] = complement_by_gram_schmidt(&v0);
        (g1, g2)
    } else {
        (e_hi, e_lo)
    };
    let mut pairs = if isolated_high {
        [(l0, v0), (mu_hi, e_hi), (mu_lo, e_lo)]
    } else {
        [(mu_hi, e_hi), (mu_lo, e_lo), (l0, v0)]
    };
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let decomposition = EigenDecomposition {
        values: pairs.map(|(l, _)| l * scale),
        vectors: from_columns(&pairs.map(|(_, v)| v)),
    };
    let sane = decomposition.values.iter().all(|v| v.is_finite()) && orthonormality_error(&decomposition.vectors) < 1e-10;
    canonicalize(if sane { decomposition } else { jacobi_decomposition(&m, scale) })
}

/// Eigenpairs of `m` restricted to the plane orthogonal to the unit vector `v0`, larger first.
fn complement_pair(m: &Mat3, v0: &[f64; 3]) -> ((f64, [f64; 3]), (f64, [f64; 3])) {
    let (u, w) = orthonormal_complement(v0);
    let (mu, mw) = (mat_vec(m, &u), mat_vec(m, &w));
    let (b00, b01, b11) = (dot(&u, &mu), 0.5 * (dot(&u, &mw) + dot(&w, &mu)), dot(&w, &mw));
    let mean = 0.5 * (b00 + b11);
    let rad = (0.5 * (b00 - b11)).hypot(b01);
    let theta = 0.5 * (2.0 * b01).atan2(b00 - b11);
    let (c, s) = (theta.cos(), theta.sin());
    let hi = [c * u[0] + s * w[0], c * u[1] + s * w[1], c * u[2] + s * w[2]];
    let lo = [-s * u[0] + c * w[0], -s * u[1] + c * w[1], -s * u[2] + c * w[2]];
    ((mean + rad, hi), (mean - rad, lo))
}

fn jacobi_decomposition(m: &Mat3, scale: f64) -> EigenDecomposition {
    let (d, v) = jacobi_sweeps(m, 50);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    EigenDecomposition {
        values: order.map(|i| d[i] * scale),
        vectors: from_columns(&order.map(|i| column(&v, i))),
    }
}

/// Cyclic Jacobi rotations; returns diagonal entries and accumulated rotations.
pub(crate) fn jacobi_sweeps(m: &Mat3, max_sweeps: usize) -> ([f64; 3], Mat3) {
    let mut a = *m;
    let mut v = IDENTITY3;
    for _ in 0..max_sweeps {
        let off = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
        if off == 0.0 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let vkp = row[p];
                let vkq = row[q];
                row[p] = c * vkp - s * vkq;
                row[q] = s * vkp + c * vkq;
            }
        }
    }
    ([a[0][0], a[1][1], a[2][2]], v)
}

/// Largest cross product among the rows of `m - λI`.
fn eigenvector_from_rows(m: &Mat3, lambda: f64) -> [f64; 3] {
    let r0 = [m[0][0] - lambda, m[0][1], m[0][2]];
    let r1 = [m[1][0], m[1][1] - lambda, m[1][2]];
    let r2 = [m[2][0], m[2][1], m[2][2] - lambda];
    let candidates = [cross(&r0, &r1), cross(&r0, &r2), cross(&r1, &r2)];
    let best = candidates
        .iter()
        .max_by(|a, b| dot(a, a).total_cmp(&dot(b, b)))
        .copied()
        .unwrap_or([1.0, 0.0, 0.0]);
    let n = dot(&best, &best).sqrt();
    if n == 0.0 {
        [1.0, 0.0, 0.0]
    } else {
        best.map(|c| c / n)
    }
}

fn orthonormal_complement(v: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let u = if v[0].abs() > v[1].abs() {
        let inv = 1.0 / (v[0] * v[0] + v[2] * v[2]).sqrt();
        [-v[2] * inv, 0.0, v[0] * inv]
    } else {
        let inv = 1.0 / (v[1] * v[1] + v[2] * v[2]).sqrt();
        [0.0, v[2] * inv, -v[1] * inv]
    };
    let w = cross(v, &u);
    (u, w)
}

/// Two unit vectors orthogonal to `v` (and each other), seeded from x, y, z in order.
fn complement_by_gram_schmidt(v: &[f64; 3]) -> [[f64; 3]; 2] {
    let mut found: Vec<[f64; 3]> = Vec::with_capacity(2);
    for axis in 0..3 {
        let mut e = [0.0; 3];
        e[axis] = 1.0;
        for basis in std::iter::once(v).chain(found.iter()) {
            let d = dot(&e, basis);
            for c in 0..3 {
                e[c] -= d * basis[c];
            }
        }
        let n = dot(&e, &e).sqrt();
        if n > 0.1 {
            found.push(e.map(|c| c / n));
            if found.len() == 2 {
                break;
            }
        }
    }
    [found[0], found[1]]
}

/// Largest-magnitude entry of each column positive, then `det = +1` via the third column.
fn canonicalize(mut d: EigenDecomposition) -> EigenDecomposition {
    for n in 0..3 {
        let col = column(&d.vectors, n);
        let lead = col.iter().copied().fold(0.0_f64, |best, c| if c.abs() > best.abs() { c } else { best });
        if lead < 0.0 {
            for row in d.vectors.iter_mut() {
                row[n] = -row[n];
            }
        }
    }
    if det3(&d.vectors) < 0.0 {
        for row in d.vectors.iter_mut() {
            row[2] = -row[2];
        }
    }
    d
}

fn rayleigh(m: &Mat3, v: &[f64; 3]) -> f64 {
    dot(v, &mat_vec(m, v))
}

fn sort_desc(v: &mut [f64; 3]) {
    v.sort_by(|a, b| b.total_cmp(a));
}

fn scale_matrix(m: &Mat3, s: f64) -> Mat3 {
    m.map(|row| row.map(|c| c * s))
}

pub fn column(m: &Mat3, n: usize) -> [f64; 3] {
    [m[0][n], m[1][n], m[2][n]]
}

pub fn from_columns(cols: &[[f64; 3]; 3]) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for (n, col) in cols.iter().enumerate() {
        for i in 0..3 {
            m[i][n] = col[i];
        }
    }
    m
}

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn transpose(m: &Mat3) -> Mat3 {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = m[j][i];
        }
    }
    t
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn mat_vec(m: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

pub fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Largest deviation of `vᵀv` from the identity.
pub fn orthonormality_error(v: &Mat3) -> f64 {
    let vtv = mat_mul(&transpose(v), v);
    let mut worst = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((vtv[i][j] - target).abs());
        }
    }
    worst
}
