//! Steady half-channel solve by under-relaxed successive substitution.
//!
//! In fully developed flow the total shear at every face is fixed by the
//! pressure gradient, so momentum reduces to a scalar root per face: the
//! gradient at which viscous plus modeled shear carries the load. The
//! modeled shear comes from the Boussinesq stress, perturbed in perturbed
//! modes, so the balance holds for the stress the flow actually sees. The
//! gradients are under-relaxed and integrated from the wall.
//!
//! k and ω are then solved as linear tridiagonal problems with coefficients
//! frozen at the current iterate. Production is linearized in k with the
//! momentum balance held, which keeps stress-limited regions (where a
//! perturbed stress would exceed the load as the gradient vanishes) stable.

use serde::{Deserialize, Serialize};

use super::grid::{solve_tridiagonal, Grid};
use super::sst::SstConstants;
use super::{ChannelConfig, ChannelMode};
use crate::barycentric::{BaryPoint, STANDARD_CORNERS};
use crate::error::{EpfError, Result};
use crate::perturbation::{perturb_eigenspace, perturb_legacy_unchecked, stress_barycentric, PerturbationSpec};
use crate::tensor::{validate_realizability, SymTensor3, K_FLOOR, REALIZABILITY_EPS};

/// Bulk `ν_t/ν` below which the flow is reported as laminarized.
pub const LAMINAR_THRESHOLD: f64 = 1e-3;
/// A residual this many times above its best value counts toward divergence.
const DIVERGENCE_FACTOR: f64 = 1e3;
const SPOT_CHECK_INTERVAL: usize = 100;

/// Mean velocity, k and ω at the cell centres, in solver units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub u: Vec<f64>,
    pub k: Vec<f64>,
    pub omega: Vec<f64>,
}

impl FlowState {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Law-of-the-wall guess.
    fn initial(grid: &Grid, cfg: &ChannelConfig) -> Self {
        let (nu, ut) = (cfg.viscosity(), cfg.friction_velocity());
        let c = &cfg.model_constants;
        let mut s = FlowState { u: vec![], k: vec![], omega: vec![] };
        for &y in &grid.centers {
            let yp = y * ut / nu;
            let up = (1.0 + c.kappa * yp).ln() / c.kappa
                + 7.8 * (1.0 - (-yp / 11.0).exp() - yp / 11.0 * (-yp / 3.0).exp());
            s.u.push(up * ut);
            s.k.push((yp / 10.0).powi(2).min(1.0) * ut * ut);
            s.omega.push(6.0 * nu / (c.beta1 * y * y) + ut / (c.beta_star.sqrt() * c.kappa * y));
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelSolution {
    pub mode: ChannelMode,
    pub perturbation: Option<PerturbationSpec>,
    pub re_tau: f64,
    pub y_plus: Vec<f64>,
    pub u_plus: Vec<f64>,
    pub k_plus: Vec<f64>,
    pub omega_plus: Vec<f64>,
    pub nu_t_ratio: Vec<f64>,
    /// Cell stresses in wall units (perturbed stresses in perturbed modes).
    pub tau_profiles: Vec<SymTensor3>,
    pub bary_points: Vec<BaryPoint>,
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub laminarized: bool,
    pub diverged: bool,
    pub iterations: usize,
    pub final_residual: f64,
    /// Wall shear stress in units of `u_τ²`; one for a balanced solution.
    pub wall_shear: f64,
    /// Cells that failed the periodic realizability spot check.
    pub realizability_violations: usize,
    pub state: FlowState,
}

impl ChannelSolution {
    /// Converged or laminarized, and not diverged.
    pub fn is_usable(&self) -> bool {
        !self.diverged && (self.converged || self.laminarized)
    }

    pub fn centerline_u_plus(&self) -> f64 {
        *self.u_plus.last().unwrap_or(&f64::NAN)
    }

    pub fn label(&self) -> String {
        self.perturbation.map(|p| p.label()).unwrap_or_else(|| "baseline".into())
    }
}

/// `τ = 2/3 k I − 2 ν_t S` for simple shear `dU/dy`.
pub fn boussinesq_stress(k: f64, nu_t: f64, dudy: f64) -> SymTensor3 {
    let d = 2.0 / 3.0 * k;
    SymTensor3::new(d, d, d, -nu_t * dudy, 0.0, 0.0)
}

/// How the modeled stress is turned into the stress the flow sees.
struct StressModel {
    mode: ChannelMode,
    spec: Option<PerturbationSpec>,
}

impl StressModel {
    fn stress(&self, k: f64, nu_t: f64, dudy: f64) -> SymTensor3 {
        let Some(spec) = self.spec.filter(|_| self.mode != ChannelMode::Baseline) else {
            return boussinesq_stress(k, nu_t, dudy);
        };
        if k <= K_FLOOR {
            return SymTensor3::zero();
        }
        // Boussinesq can leave the realizable set where the stress limiter is inactive.
        let shear = (-nu_t * dudy / k).clamp(-2.0 / 3.0, 2.0 / 3.0);
        let tau = boussinesq_stress(k, shear * k, -1.0);
        let out = match self.mode {
            ChannelMode::Legacy => perturb_legacy_unchecked(&tau, &spec, &STANDARD_CORNERS),
            _ => perturb_eigenspace(&tau, &spec, &STANDARD_CORNERS),
        };
        out.map(|s| s.tau_star).unwrap_or(SymTensor3::new(f64::NAN, 0.0, 0.0, f64::NAN, 0.0, 0.0))
    }
}

/// Turns a local state and velocity gradient into eddy viscosity and stress.
struct ShearLaw<'a> {
    model: &'a StressModel,
    c: &'a SstConstants,
    nu: f64,
}

impl ShearLaw<'_> {
    fn nu_t(&self, k: f64, omega: f64, f2: f64, dudy: f64) -> f64 {
        self.c.eddy_viscosity(k, omega, dudy, f2)
    }

    fn stress(&self, k: f64, omega: f64, f2: f64, dudy: f64) -> SymTensor3 {
        self.model.stress(k, self.nu_t(k, omega, f2, dudy), dudy)
    }

    /// Gradient at which viscous plus turbulent shear carries `load`.
    ///
    /// In fully developed flow the total shear at a face is fixed by the
    /// pressure gradient, so the face gradient is a scalar root. When the
    /// turbulent stress alone already exceeds the load as the gradient goes
    /// to zero (possible once the stress is perturbed towards a limiting
    /// state) there is no root and the face is held at zero gradient.
    fn gradient(&self, k: f64, omega: f64, f2: f64, load: f64, guess: f64) -> f64 {
        if load <= 0.0 {
            return 0.0;
        }
        if k <= K_FLOOR {
            return load / self.nu;
        }
        let g = |x: f64| self.nu * x - self.stress(k, omega, f2, x).xy - load;
        // |τ_xy| ≤ k for any realizable stress, so the root lies below `hi`.
        let hi = (load + k) / self.nu * (1.0 + 1e-12);
        // Smallest gradient whose shear anisotropy is clear of the degeneracy cut-off.
        let lo = 1e-9 * omega.max(f64::MIN_POSITIVE);
        let g_lo = g(lo);
        if g_lo >= 0.0 {
            return 0.0;
        }
        let (mut a, mut fa, mut b, mut fb) = (lo, g_lo, hi, g(hi));
        if guess > a && guess < b {
            let fg = g(guess);
            let mut step = 1e-6;
            if fg < 0.0 {
                (a, fa) = (guess, fg);
                while step < 1.0 {
                    let x = guess * (1.0 + step);
                    if x >= b {
                        break;
                    }
                    let fx = g(x);
                    if fx >= 0.0 {
                        (b, fb) = (x, fx);
                        break;
                    }
                    (a, fa) = (x, fx);
                    step *= 16.0;
                }
            } else {
                (b, fb) = (guess, fg);
                while step < 1.0 {
                    let x = guess * (1.0 - step);
                    if x <= a {
                        break;
                    }
                    let fx = g(x);
                    if fx < 0.0 {
                        (a, fa) = (x, fx);
                        break;
                    }
                    (b, fb) = (x, fx);
                    step *= 16.0;
                }
            }
        }
        illinois(g, (a, fa), (b, fb), 1e-14 * load)
    }
}

/// Bracketed false position with the Illinois modification; `fa < 0 ≤ fb`.
fn illinois(g: impl Fn(f64) -> f64, (mut a, mut fa): (f64, f64), (mut b, mut fb): (f64, f64), ftol: f64) -> f64 {
    let mut side = 0;
    for _ in 0..200 {
        if fb == 0.0 {
            return b;
        }
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = g(x);
        if fx.abs() <= ftol {
            return x;
        }
        if fx < 0.0 {
            (a, fa) = (x, fx);
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            (b, fb) = (x, fx);
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        if b - a <= 1e-15 * b {
            break;
        }
    }
    0.5 * (a + b)
}

/// Relative step used to differentiate production with respect to k.
const K_STEP: f64 = 1e-5;

/// Everything the three transport equations need from the current iterate.
struct Fields {
    dudy_face: Vec<f64>,
    dudy: Vec<f64>,
    nu_t: Vec<f64>,
    nu_t_face: Vec<f64>,
    sigma_k_face: Vec<f64>,
    sigma_omega_face: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<f64>,
    f2: Vec<f64>,
    cross_diffusion: Vec<f64>,
    tau: Vec<SymTensor3>,
    production: Vec<f64>,
    /// dP/dk with the momentum balance held, for a Newton linearization.
    production_slope: Vec<f64>,
}

struct Face {
    k: Vec<f64>,
    omega: Vec<f64>,
    f2: Vec<f64>,
    load: Vec<f64>,
}

impl Face {
    fn gradients(&self, law: &ShearLaw, k_factor: f64, guess: &[f64]) -> Vec<f64> {
        (0..self.k.len())
            .map(|j| law.gradient(self.k[j] * k_factor, self.omega[j], self.f2[j], self.load[j], guess[j]))
            .collect()
    }
}

impl Fields {
    /// Face gradients move from those of `s.u` towards the momentum-balanced
    /// ones by `relax`.
    fn evaluate(grid: &Grid, s: &FlowState, law: &ShearLaw, omega_wall: f64, forcing: f64, relax: f64) -> Self {
        let n = grid.len();
        let c = law.c;
        let dk = Grid::cell_gradient(&grid.face_gradient(&s.k, 0.0));
        let domega = Grid::cell_gradient(&grid.face_gradient(&s.omega, omega_wall));

        let mut f = Fields {
            dudy_face: vec![],
            dudy: vec![],
            nu_t: vec![0.0; n],
            nu_t_face: vec![],
            sigma_k_face: vec![],
            sigma_omega_face: vec![],
            beta: vec![0.0; n],
            gamma: vec![0.0; n],
            f2: vec![0.0; n],
            cross_diffusion: vec![0.0; n],
            tau: Vec::with_capacity(n),
            production: vec![0.0; n],
            production_slope: vec![0.0; n],
        };
        let mut sigma_k = vec![0.0; n];
        let mut sigma_omega = vec![0.0; n];
        for i in 0..n {
            let b = c.blend(law.nu, grid.centers[i], s.k[i], s.omega[i], dk[i], domega[i]);
            (sigma_k[i], sigma_omega[i]) = (b.sigma_k, b.sigma_omega);
            (f.beta[i], f.gamma[i], f.f2[i], f.cross_diffusion[i]) = (b.beta, b.gamma, b.f2, b.cross_diffusion);
        }
        let face = Face {
            k: grid.face_values(&s.k, 0.0),
            omega: grid.face_values(&s.omega, omega_wall),
            f2: grid.face_values(&f.f2, 1.0),
            load: grid.faces.iter().map(|y| forcing * (grid.faces[n] - y)).collect(),
        };
        let current = grid.face_gradient(&s.u, 0.0);
        let lag = |x: Vec<f64>| -> Vec<f64> { x.iter().zip(&current).map(|(a, g)| g + relax * (a - g)).collect() };
        let solved = face.gradients(law, 1.0, &current);
        let stepped = Grid::cell_gradient(&lag(face.gradients(law, 1.0 + K_STEP, &solved)));
        f.dudy_face = lag(solved);
        f.dudy = Grid::cell_gradient(&f.dudy_face);
        for i in 0..n {
            let (k, w, f2) = (s.k[i], s.omega[i], f.f2[i]);
            f.nu_t[i] = law.nu_t(k, w, f2, f.dudy[i]);
            let tau = law.stress(k, w, f2, f.dudy[i]);
            if k > K_FLOOR {
                f.production[i] = -tau.xy * f.dudy[i];
                let ks = k * (1.0 + K_STEP);
                let p = -law.stress(ks, w, f2, stepped[i]).xy * stepped[i];
                f.production_slope[i] = (p - f.production[i]) / (ks - k);
            }
            f.tau.push(tau);
        }
        f.nu_t_face = grid.face_values(&f.nu_t, 0.0);
        f.sigma_k_face = grid.face_values(&sigma_k, c.sigma_k1);
        f.sigma_omega_face = grid.face_values(&sigma_omega, c.sigma_omega1);
        f
    }
}

/// Tridiagonal system for `−d/dy(Γ dφ/dy) + Sp φ = Su` with a Dirichlet wall and a symmetry plane.
struct Assembly {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    rhs: Vec<f64>,
}

impl Assembly {
    /// `gamma_face` holds the diffusivity at faces `0..=n`; the symmetry face carries no flux.
    fn diffusion(grid: &Grid, gamma_face: &[f64], wall: f64) -> Self {
        let n = grid.len();
        let d: Vec<f64> = (0..=n).map(|j| if j == n { 0.0 } else { gamma_face[j] / grid.spacing[j] }).collect();
        let mut a = Assembly { lower: vec![0.0; n], diag: vec![0.0; n], upper: vec![0.0; n], rhs: vec![0.0; n] };
        for i in 0..n {
            a.lower[i] = -d[i];
            a.upper[i] = -d[i + 1];
            a.diag[i] = d[i] + d[i + 1];
        }
        a.rhs[0] += d[0] * wall;
        a.lower[0] = 0.0;
        a
    }

    /// Adds `su − sp φ` per unit volume.
    fn source(&mut self, grid: &Grid, i: usize, su: f64, sp: f64) {
        self.rhs[i] += su * grid.widths[i];
        self.diag[i] += sp * grid.widths[i];
    }

    fn solve(mut self) -> Vec<f64> {
        solve_tridiagonal(&self.lower, &self.diag, &self.upper, &mut self.rhs);
        self.rhs
    }
}

/// Velocity from the face gradients, integrated out from the no-slip wall.
fn integrate_velocity(grid: &Grid, f: &Fields) -> Vec<f64> {
    let mut u = 0.0;
    (0..grid.len())
        .map(|i| {
            u += f.dudy_face[i] * grid.spacing[i];
            u
        })
        .collect()
}

fn k_update(grid: &Grid, s: &FlowState, f: &Fields, nu: f64, c: &SstConstants) -> Vec<f64> {
    let gamma: Vec<f64> = f.nu_t_face.iter().zip(&f.sigma_k_face).map(|(nt, sk)| nu + sk * nt).collect();
    let mut a = Assembly::diffusion(grid, &gamma, 0.0);
    for i in 0..grid.len() {
        let (p, slope) = (f.production[i], f.production_slope[i]);
        let (k, w) = (s.k[i], s.omega[i]);
        let destruction = c.beta_star * w;
        let cap = 10.0 * c.beta_star * k * w;
        if p > cap {
            a.source(grid, i, cap, destruction);
        } else if p >= 0.0 && slope < 0.0 {
            a.source(grid, i, p - slope * k, destruction - slope);
        } else if p >= 0.0 {
            a.source(grid, i, p, destruction);
        } else {
            a.source(grid, i, 0.0, destruction - p / k);
        }
    }
    a.solve()
}

fn omega_update(grid: &Grid, s: &FlowState, f: &Fields, nu: f64, omega_wall: f64, c: &SstConstants) -> Vec<f64> {
    let gamma: Vec<f64> = f.nu_t_face.iter().zip(&f.sigma_omega_face).map(|(nt, so)| nu + so * nt).collect();
    let mut a = Assembly::diffusion(grid, &gamma, omega_wall);
    for i in 0..grid.len() {
        let w = s.omega[i];
        // γ P / ν_t written per unit k so that it stays finite as k → 0
        let rate = if s.k[i] > K_FLOOR { f.production[i] / s.k[i] } else { 0.0 };
        let rate = rate.min(10.0 * c.beta_star * w);
        let prod = f.gamma[i] * rate * (c.a1 * w).max(f.dudy[i].abs() * f.f2[i]) / c.a1;
        let cd = f.cross_diffusion[i];
        let (mut su, mut sp) = (f.beta[i] * w * w, 2.0 * f.beta[i] * w);
        if prod >= 0.0 {
            su += prod;
        } else {
            sp -= prod / w;
        }
        if cd >= 0.0 {
            su += cd;
        } else {
            sp -= cd / w;
        }
        a.source(grid, i, su, sp);
    }
    a.solve()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn relax(old: &mut [f64], new: &[f64], alpha: f64) {
    old.iter_mut().zip(new).for_each(|(o, n)| *o += alpha * (n - *o));
}

pub fn solve_channel(cfg: &ChannelConfig) -> Result<ChannelSolution> {
    solve_channel_from(cfg, None)
}

/// Solves from `init` (typically a converged baseline) or from a law-of-the-wall guess.
pub fn solve_channel_from(cfg: &ChannelConfig, init: Option<&FlowState>) -> Result<ChannelSolution> {
    cfg.validate()?;
    let grid = cfg.grid();
    let n = grid.len();
    let nu = cfg.viscosity();
    let c = cfg.model_constants;
    let omega_wall = c.wall_omega(nu, grid.centers[0]);
    let model = StressModel { mode: cfg.mode, spec: cfg.perturbation };
    let law = ShearLaw { model: &model, c: &c, nu };

    let mut s = match init {
        Some(s) if s.len() == n && s.k.len() == n && s.omega.len() == n => s.clone(),
        Some(s) => return Err(EpfError::InvalidConfig(format!("warm start has {} cells, grid has {n}", s.len()))),
        None => FlowState::initial(&grid, cfg),
    };

    let mut history = Vec::new();
    let mut best = f64::INFINITY;
    let mut above = 0;
    let mut k_scale = max_abs(&s.k).max(f64::MIN_POSITIVE);
    let (mut converged, mut diverged) = (false, false);
    let mut violations = 0;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        let f = Fields::evaluate(&grid, &s, &law, omega_wall, cfg.pressure_gradient, cfg.relax_momentum);
        if model.mode != ChannelMode::Baseline && iterations % SPOT_CHECK_INTERVAL == 0 {
            violations += f.tau.iter().filter(|t| !validate_realizability(t, REALIZABILITY_EPS).is_realizable).count();
        }
        let u_new = integrate_velocity(&grid, &f);
        let k_new = k_update(&grid, &s, &f, nu, &c);
        let w_new = omega_update(&grid, &s, &f, nu, omega_wall, &c);
        iterations += 1;

        let ru = max_abs_diff(&u_new, &s.u) / max_abs(&s.u).max(f64::MIN_POSITIVE);
        let rk = max_abs_diff(&k_new, &s.k) / k_scale;
        let rw = w_new.iter().zip(&s.omega).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs() / b));
        let res = ru.max(rk).max(rw);

        s.u = u_new;
        relax(&mut s.k, &k_new, cfg.relax_turbulence);
        relax(&mut s.omega, &w_new, cfg.relax_turbulence);
        k_scale = k_scale.max(max_abs(&s.k));
        history.push(res);

        let healthy = res.is_finite() && s.k.iter().all(|k| *k >= 0.0) && s.omega.iter().all(|w| *w > 0.0);
        if !healthy {
            diverged = true;
            break;
        }
        if res < cfg.conv_tol {
            converged = true;
            break;
        }
        if res < best {
            best = res;
            above = 0;
        } else if res > DIVERGENCE_FACTOR * best {
            above += 1;
            if above >= cfg.divergence_window {
                diverged = true;
                break;
            }
        }
    }

    let f = Fields::evaluate(&grid, &s, &law, omega_wall, cfg.pressure_gradient, cfg.relax_momentum);
    let ut = cfg.friction_velocity();
    let ut2 = ut * ut;
    let bulk = grid.average(&f.nu_t) / nu;
    let tau_profiles: Vec<SymTensor3> = f.tau.iter().map(|t| *t * (1.0 / ut2)).collect();
    let bary_points = tau_profiles
        .iter()
        .map(|t| stress_barycentric(t).unwrap_or(BaryPoint::new(f64::NAN, f64::NAN)))
        .collect();
    Ok(ChannelSolution {
        mode: cfg.mode,
        perturbation: cfg.perturbation,
        re_tau: cfg.re_tau,
        y_plus: grid.centers.iter().map(|y| y * ut / nu).collect(),
        u_plus: s.u.iter().map(|u| u / ut).collect(),
        k_plus: s.k.iter().map(|k| k / ut2).collect(),
        omega_plus: s.omega.iter().map(|w| w * nu / ut2).collect(),
        nu_t_ratio: f.nu_t.iter().map(|v| v / nu).collect(),
        tau_profiles,
        bary_points,
        final_residual: history.last().copied().unwrap_or(f64::NAN),
        residual_history: history,
        converged,
        laminarized: !diverged && bulk < LAMINAR_THRESHOLD,
        diverged,
        iterations,
        wall_shear: nu * f.dudy_face[0] / ut2,
        realizability_violations: violations,
        state: s,
    })
}
