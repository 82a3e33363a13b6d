//! Geometrically stretched cell-centred grid on the half channel `y ∈ [0, 1]`.

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    /// `n + 1` face positions, wall first.
    pub faces: Vec<f64>,
    pub centers: Vec<f64>,
    pub widths: Vec<f64>,
    /// Distance between the centres on either side of each face; the wall
    /// face uses the first centre's wall distance, the symmetry face is unused.
    pub spacing: Vec<f64>,
}

impl Grid {
    /// Cell `i` has width `Δ0 rⁱ` with `Σ = 1`.
    pub fn stretched(n: usize, ratio: f64) -> Self {
        let first = if (ratio - 1.0).abs() < 1e-12 { 1.0 / n as f64 } else { (ratio - 1.0) / (ratio.powi(n as i32) - 1.0) };
        let mut faces = Vec::with_capacity(n + 1);
        faces.push(0.0);
        let mut w = first;
        for _ in 0..n {
            faces.push(faces.last().unwrap() + w);
            w *= ratio;
        }
        faces[n] = 1.0;
        let widths: Vec<f64> = faces.windows(2).map(|f| f[1] - f[0]).collect();
        let centers: Vec<f64> = faces.windows(2).map(|f| 0.5 * (f[0] + f[1])).collect();
        let mut spacing = vec![centers[0]];
        spacing.extend(centers.windows(2).map(|c| c[1] - c[0]));
        spacing.push(f64::NAN);
        Self { faces, centers, widths, spacing }
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Gradient at every face of a cell field with wall value `wall`; zero at the symmetry face.
    pub fn face_gradient(&self, phi: &[f64], wall: f64) -> Vec<f64> {
        let n = self.len();
        let mut g = vec![0.0; n + 1];
        g[0] = (phi[0] - wall) / self.spacing[0];
        for j in 1..n {
            g[j] = (phi[j] - phi[j - 1]) / self.spacing[j];
        }
        g
    }

    /// Face gradients averaged onto the cell centres.
    pub fn cell_gradient(face_grad: &[f64]) -> Vec<f64> {
        face_grad.windows(2).map(|g| 0.5 * (g[0] + g[1])).collect()
    }

    /// Face values by linear interpolation between centres; `wall` at face 0,
    /// the last cell's value at the symmetry face.
    pub fn face_values(&self, phi: &[f64], wall: f64) -> Vec<f64> {
        let n = self.len();
        let mut f = vec![0.0; n + 1];
        f[0] = wall;
        for j in 1..n {
            let t = (self.faces[j] - self.centers[j - 1]) / self.spacing[j];
            f[j] = phi[j - 1] + t * (phi[j] - phi[j - 1]);
        }
        f[n] = phi[n - 1];
        f
    }

    /// Volume average of a cell field.
    pub fn average(&self, phi: &[f64]) -> f64 {
        phi.iter().zip(&self.widths).map(|(p, w)| p * w).sum()
    }
}

/// Solves a tridiagonal system in place (Thomas algorithm); `lower[0]` and
/// `upper[n-1]` are ignored.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    c[0] = upper[0] / beta;
    rhs[0] /= beta;
    for i in 1..n {
        beta = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / beta;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}
