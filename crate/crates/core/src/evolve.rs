//! Radial nonlinear wave-map evolution around a harmonic map background.
//!
//! The unknown is the perturbation `w = psi - Q` on a grid `0 = r_0 < ... < r_N = R`.
//! The radial Laplacian is the conservative flux form
//! `(1/m_i) [s_{i+1/2} (w_{i+1} - w_i)/h_{i+1/2} - s_{i-1/2} (w_i - w_{i-1})/h_{i-1/2}]`
//! with `s = sinh` at cell faces and `m_i` the exact `sinh r dr` mass of the dual cell,
//! so nonuniform (graded) grids need no special treatment. The background is
//! subtracted analytically: the force on `w` is `L w - [gg'(Q+w) - gg'(Q)] / sinh^2 r`,
//! which vanishes identically at `w = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{HarmonicFamily, Target};
use crate::numerics::quad::simpson;
use crate::profile::RadialProfile;
use crate::spectral::SpectralResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Dirichlet `w = 0` at R: energy is conserved.
    Reflecting,
    /// Outgoing condition `w_t + w_r + w/2 = 0` plus a damping sponge.
    Absorbing,
}

pub const MAX_CFL: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolverConfig {
    pub r_max: f64,
    /// Spacing of the uniform part of the grid.
    pub dr: f64,
    pub cfl: f64,
    /// Spacing of a refined uniform core `[0, core_radius]`, joined to `dr` by
    /// geometric growth at rate `grading`; `None` is a uniform grid.
    pub h_min: Option<f64>,
    pub core_radius: f64,
    pub grading: f64,
    pub boundary: Boundary,
    pub sponge_fraction: f64,
    pub sponge_strength: f64,
    /// Time between emitted frames.
    pub emit_interval: f64,
    /// Time between recorded diagnostics.
    pub sample_interval: f64,
    pub local_radius: f64,
    /// Drop the nonlinearity (evolve the linearized equation).
    pub linearized: bool,
}

impl Default for EvolverConfig {
    fn default() -> Self {
        Self {
            r_max: 60.0,
            dr: 0.02,
            cfl: 0.5,
            h_min: None,
            core_radius: 0.3,
            grading: 1.05,
            boundary: Boundary::Absorbing,
            sponge_fraction: 0.1,
            sponge_strength: 4.0,
            emit_interval: 1.0,
            sample_interval: 0.01,
            local_radius: 1.0,
            linearized: false,
        }
    }
}

impl EvolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if !(self.r_max > 1.0 && self.dr > 0.0 && self.dr < self.r_max / 10.0) {
            return bad("need r_max > 1 and 0 < dr < r_max/10");
        }
        if !(self.cfl > 0.0 && self.cfl <= MAX_CFL) {
            return bad("cfl must lie in (0, 0.9]");
        }
        if let Some(h) = self.h_min {
            let ok = h > 0.0 && h <= self.dr && self.grading > 1.0 && self.grading < 1.5;
            if !(ok && self.core_radius > h && self.core_radius < 0.5 * self.r_max) {
                return bad("need 0 < h_min <= dr, h_min < core_radius < r_max/2 and grading in (1, 1.5)");
            }
        }
        if !(0.0..0.5).contains(&self.sponge_fraction) || self.sponge_strength < 0.0 {
            return bad("sponge_fraction in [0, 0.5) and sponge_strength >= 0");
        }
        if !(self.emit_interval > 0.0 && self.sample_interval > 0.0 && self.local_radius > 0.0) {
            return bad("emit_interval, sample_interval and local_radius must be positive");
        }
        Ok(())
    }

    /// Grid nodes including the origin.
    pub fn nodes(&self) -> Vec<f64> {
        let Some(h) = self.h_min else {
            let n = (self.r_max / self.dr).round() as usize;
            return (0..=n).map(|i| self.r_max * i as f64 / n as f64).collect();
        };
        let k = (self.core_radius / h).round() as usize;
        let mut g: Vec<f64> = (0..=k).map(|i| i as f64 * h).collect();
        let (mut r, mut s) = (g[k], h);
        while s * self.grading < self.dr {
            s *= self.grading;
            r += s;
            g.push(r);
        }
        let n = ((self.r_max - r) / self.dr).round().max(1.0) as usize;
        let step = (self.r_max - r) / n as f64;
        g.extend((1..=n).map(|i| r + i as f64 * step));
        g
    }

    pub fn min_spacing(&self) -> f64 {
        self.nodes().windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Largest admissible time step: cfl times the smallest spacing.
    pub fn time_step(&self) -> f64 {
        self.cfl * self.min_spacing()
    }
}

/// Field `psi(t, .)` and velocity on the grid without the origin node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveState {
    pub t: f64,
    pub psi: RadialProfile,
    pub psi_t: RadialProfile,
    pub family: HarmonicFamily,
}

impl WaveState {
    /// `(Q + w0, w1)` on `grid` (origin excluded).
    pub fn perturbed(
        family: HarmonicFamily,
        grid: &[f64],
        w0: impl Fn(f64) -> f64,
        w1: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        Ok(Self {
            t: 0.0,
            psi: RadialProfile::from_fn(grid.to_vec(), 1.0, |r| family.value(r) + w0(r))?,
            psi_t: RadialProfile::from_fn(grid.to_vec(), 1.0, w1)?,
            family,
        })
    }

    pub fn stationary(family: HarmonicFamily, grid: &[f64]) -> Result<Self> {
        Self::perturbed(family, grid, |_| 0.0, |_| 0.0)
    }

    /// `w = psi - Q` at the grid nodes.
    pub fn perturbation(&self) -> Vec<f64> {
        self.psi.grid.iter().zip(&self.psi.values).map(|(&r, v)| v - self.family.value(r)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionDiagnostics {
    pub t: f64,
    pub energy: f64,
    pub h0_distance: f64,
    pub local_energy: f64,
    pub mode_amplitude: f64,
    pub s_norm_partial: f64,
}

/// (1/2) int (psi_t^2 + psi_r^2 + g(psi)^2 / sinh^2 r) sinh r dr.
///
/// Split as E(Q) plus the integral of the change in the density, so that
/// rounding noise in psi is not amplified by the sinh r weight at large r.
pub fn energy(state: &WaveState) -> f64 {
    let fam = &state.family;
    let target = fam.target;
    let w: Vec<f64> = state
        .psi
        .values
        .iter()
        .zip(state.perturbation())
        .map(|(p, w)| if w.abs() <= 4.0 * f64::EPSILON * p.abs() { 0.0 } else { w })
        .collect();
    let Ok(wp) = RadialProfile::new(state.psi.grid.clone(), w, 1.0) else {
        return f64::NAN;
    };
    let delta = 0.5
        * wp.integrate(|r, w, dw| {
            let s = r.sinh();
            let q2 = 2.0 * fam.value(r) + w;
            // g^2(Q + w) - g^2(Q) = g(w) g(2Q + w) with sinh for the hyperbolic target
            let dg2 = match target {
                Target::Sphere => w.sin() * q2.sin(),
                Target::HyperbolicPlane => w.sinh() * q2.sinh(),
            };
            (dw * (2.0 * fam.derivative(r) + dw) + dg2 / (s * s)) * s
        });
    let kinetic = 0.5 * state.psi_t.integrate(|r, v, _| v * v * r.sinh());
    fam.energy + delta + kinetic
}

/// `(sup |psi|, G^{-1}(E))`; the bound holds for every finite-energy state with psi(0) = 0.
pub fn linf_energy_bound_check(state: &WaveState) -> Result<(f64, f64)> {
    let sup = state.psi.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let e = energy(state);
    if e == 0.0 && sup == 0.0 {
        return Ok((0.0, 0.0));
    }
    let bound = state.family.target.big_g_inv(e);
    if sup > bound + 1e-6 {
        return Err(Error::BoundViolated { sup, bound });
    }
    Ok((sup, bound))
}

/// `(int (int |u|^6 sinh^3 r dr)^{1/2} dt)^{1/3}` over the stream, trapezoid in t.
pub fn scattering_norm(u_stream: &[(f64, RadialProfile)]) -> f64 {
    if u_stream.len() < 2 {
        return 0.0;
    }
    let t: Vec<f64> = u_stream.iter().map(|x| x.0).collect();
    let l6_cubed: Vec<f64> = u_stream
        .iter()
        .map(|(_, u)| u.integrate(|r, v, _| v.powi(6) * r.sinh().powi(3)).max(0.0).sqrt())
        .collect();
    let mut acc = 0.0;
    for i in 1..t.len() {
        acc += 0.5 * (t[i] - t[i - 1]) * (l6_cubed[i] + l6_cubed[i - 1]);
    }
    acc.cbrt()
}

/// `2x - sin 2x` (sphere) or `sinh 2x - 2x` (hyperbolic), without cancellation.
fn double_angle_defect(target: Target, x: f64) -> f64 {
    let y = 2.0 * x;
    if y.abs() < 1e-2 {
        let y3 = y * y * y;
        let sign = if target == Target::Sphere { -1.0 } else { 1.0 };
        return y3 / 6.0 * (1.0 + sign * y * y / 20.0 + y.powi(4) / 840.0);
    }
    match target {
        Target::Sphere => y - y.sin(),
        Target::HyperbolicPlane => y.sinh() - y,
    }
}

/// Precomputed geometry and background for the stepping loop.
struct Mesh {
    r: Vec<f64>,
    /// Face fluxes `sinh(r_{i+1/2}) / h_{i+1/2}` for i = 0..N-1.
    face: Vec<f64>,
    /// Dual-cell masses `int sinh r dr`.
    mass: Vec<f64>,
    inv_sinh2: Vec<f64>,
    /// cos 2Q, sin 2Q (or cosh 2P, sinh 2P) at the nodes.
    c2q: Vec<f64>,
    s2q: Vec<f64>,
    sponge: Vec<f64>,
    /// `sinh(R) Q_r(R)`, the weight of the boundary term in the energy identity.
    boundary_weight: f64,
}

impl Mesh {
    fn new(r: Vec<f64>, family: &HarmonicFamily, cfg: &EvolverConfig) -> Self {
        let n = r.len() - 1;
        let mid: Vec<f64> = r.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let face = (0..n).map(|i| mid[i].sinh() / (r[i + 1] - r[i])).collect();
        // cosh a - cosh b = 2 sinh((a+b)/2) sinh((a-b)/2)
        let cell = |a: f64, b: f64| 2.0 * (0.5 * (a + b)).sinh() * (0.5 * (a - b)).sinh();
        let mass = (0..=n)
            .map(|i| {
                let hi = if i == n { r[n] } else { mid[i] };
                let lo = if i == 0 { 0.0 } else { mid[i - 1] };
                cell(hi, lo)
            })
            .collect();
        let inv_sinh2 = r.iter().map(|&x| if x == 0.0 { 0.0 } else { 1.0 / x.sinh().powi(2) }).collect();
        let (mut c2q, mut s2q) = (Vec::with_capacity(n + 1), Vec::with_capacity(n + 1));
        for &x in &r {
            let q2 = 2.0 * family.value(x);
            match family.target {
                Target::Sphere => {
                    c2q.push(q2.cos());
                    s2q.push(q2.sin());
                }
                Target::HyperbolicPlane => {
                    c2q.push(q2.cosh());
                    s2q.push(q2.sinh());
                }
            }
        }
        let big_r = r[n];
        let start = big_r * (1.0 - cfg.sponge_fraction);
        let sponge = r
            .iter()
            .map(|&x| {
                if cfg.boundary == Boundary::Absorbing && cfg.sponge_fraction > 0.0 && x > start {
                    cfg.sponge_strength * ((x - start) / (big_r - start)).powi(2)
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            boundary_weight: big_r.sinh() * family.derivative(big_r),
            r,
            face,
            mass,
            inv_sinh2,
            c2q,
            s2q,
            sponge,
        }
    }

    fn len(&self) -> usize {
        self.r.len()
    }
}

/// Time stepper (velocity Verlet with Strang-split sponge damping).
pub struct Evolver {
    mesh: Mesh,
    family: HarmonicFamily,
    cfg: EvolverConfig,
    dt: f64,
    t: f64,
    w: Vec<f64>,
    v: Vec<f64>,
    force: Vec<f64>,
    mode: Option<Vec<f64>>,
    s_acc: f64,
    last_l6_cubed: f64,
    steps: usize,
}

impl Evolver {
    /// `mode`: a unit-normalized half-line eigenfunction `phi`; the amplitude
    /// reported is `int w phi sinh^{1/2} r dr`, the 4d pairing of `u = w/sinh r`
    /// with `phi / sinh^{3/2} r`.
    pub fn new(initial: &WaveState, dt: f64, cfg: &EvolverConfig, mode: Option<&RadialProfile>) -> Result<Self> {
        cfg.validate()?;
        let nodes = cfg.nodes();
        let hmin = nodes.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        if !(dt > 0.0 && dt <= MAX_CFL * hmin * (1.0 + 1e-12)) {
            return Err(Error::Config(format!("dt = {dt} violates dt <= 0.9 * h_min = {}", MAX_CFL * hmin)));
        }
        let inner = &nodes[1..];
        let same_grid = initial.psi.len() == inner.len()
            && initial.psi.grid.iter().zip(inner).all(|(a, b)| (a - b).abs() <= 1e-12 * b.max(1.0));
        let (w_in, v_in) = if same_grid {
            (initial.perturbation(), initial.psi_t.values.clone())
        } else {
            let w0 = RadialProfile::new(initial.psi.grid.clone(), initial.perturbation(), 1.0)?;
            (w0.resample(inner, 0.0), initial.psi_t.resample(inner, 0.0))
        };
        if initial.family.target.g(initial.psi.values[0]).abs() > 0.5 {
            return Err(Error::Precondition("psi must vanish at the origin".into()));
        }
        let mesh = Mesh::new(nodes, &initial.family, cfg);
        let n = mesh.len();
        let mut w = vec![0.0; n];
        let mut v = vec![0.0; n];
        w[1..].copy_from_slice(&w_in);
        v[1..].copy_from_slice(&v_in);
        if cfg.boundary == Boundary::Reflecting {
            w[n - 1] = 0.0;
            v[n - 1] = 0.0;
        }
        let mode = mode.map(|phi| {
            mesh.r
                .iter()
                .map(|&x| if x == 0.0 { 0.0 } else { phi.value_at(x).unwrap_or(0.0) / x.sinh().sqrt() })
                .collect()
        });
        let mut ev = Self {
            mesh,
            family: initial.family,
            cfg: cfg.clone(),
            dt,
            t: initial.t,
            w,
            v,
            force: vec![0.0; n],
            mode,
            s_acc: 0.0,
            last_l6_cubed: 0.0,
            steps: 0,
        };
        ev.compute_force();
        ev.last_l6_cubed = ev.l6_cubed();
        Ok(ev)
    }

    fn compute_force(&mut self) {
        let m = &self.mesh;
        let n = m.len();
        let target = self.family.target;
        for i in 1..n - 1 {
            let w = self.w[i];
            let lap = (m.face[i] * (self.w[i + 1] - w) - m.face[i - 1] * (w - self.w[i - 1])) / m.mass[i];
            // gg'(Q+w) - gg'(Q) = cos(2Q + w) sin w  (cosh, sinh for the hyperbolic target)
            let nl = if self.cfg.linearized {
                m.c2q[i] * w
            } else {
                match target {
                    Target::Sphere => {
                        let (s, c) = w.sin_cos();
                        (m.c2q[i] * c - m.s2q[i] * s) * s
                    }
                    Target::HyperbolicPlane => (m.c2q[i] * w.cosh() + m.s2q[i] * w.sinh()) * w.sinh(),
                }
            };
            self.force[i] = lap - nl * m.inv_sinh2[i];
        }
        self.force[0] = 0.0;
        self.force[n - 1] = 0.0;
    }

    fn damp(&mut self) {
        if self.cfg.boundary == Boundary::Absorbing {
            let half = 0.5 * self.dt;
            for (v, s) in self.v.iter_mut().zip(&self.mesh.sponge) {
                if *s > 0.0 {
                    *v *= (-s * half).exp();
                }
            }
        }
    }

    pub fn step(&mut self) -> Result<()> {
        let n = self.mesh.len();
        let dt = self.dt;
        self.damp();
        for i in 1..n - 1 {
            self.v[i] += 0.5 * dt * self.force[i];
        }
        let (wn, wm) = (self.w[n - 1], self.w[n - 2]);
        for i in 1..n - 1 {
            self.w[i] += dt * self.v[i];
        }
        match self.cfg.boundary {
            Boundary::Reflecting => {
                self.w[n - 1] = 0.0;
                self.v[n - 1] = 0.0;
            }
            Boundary::Absorbing => {
                let h = self.mesh.r[n - 1] - self.mesh.r[n - 2];
                let rate = -(wn - wm) / h - 0.5 * wn;
                self.w[n - 1] = wn + dt * rate;
                self.v[n - 1] = rate;
            }
        }
        self.compute_force();
        for i in 1..n - 1 {
            self.v[i] += 0.5 * dt * self.force[i];
        }
        self.damp();
        self.t += dt;
        self.steps += 1;

        if self.steps % 64 == 0 || n < 64 {
            if let Some(i) = self.w.iter().position(|x| !x.is_finite() || x.abs() > 1e6) {
                return Err(Error::Instability { t: self.t, r: self.mesh.r[i] });
            }
        }
        let l6 = self.l6_cubed();
        self.s_acc += 0.5 * dt * (l6 + self.last_l6_cubed);
        self.last_l6_cubed = l6;
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn grid(&self) -> &[f64] {
        &self.mesh.r
    }

    pub fn perturbation(&self) -> &[f64] {
        &self.w
    }

    pub fn velocity(&self) -> &[f64] {
        &self.v
    }

    /// `||u||_{L^6}^3` with `u = w / sinh r` and the `sinh^3 r dr` measure.
    fn l6_cubed(&self) -> f64 {
        let m = &self.mesh;
        let mut s = 0.0;
        for i in 1..m.len() {
            let u6 = (self.w[i] * self.w[i]).powi(3) * m.inv_sinh2[i].powi(3);
            s += m.mass[i] * u6 / m.inv_sinh2[i];
        }
        s.sqrt()
    }

    /// Sums of the three quadratic terms up to node `upto` (inclusive):
    /// kinetic `sum m v^2`, gradient over faces, and `sum m w^2/sinh^2`.
    fn quadratic_parts(&self, upto: usize) -> (f64, f64, f64) {
        let m = &self.mesh;
        let (mut kin, mut grad, mut pot) = (0.0, 0.0, 0.0);
        for i in 0..=upto {
            kin += m.mass[i] * self.v[i] * self.v[i];
            pot += m.mass[i] * self.w[i] * self.w[i] * m.inv_sinh2[i];
            if i < upto {
                let d = self.w[i + 1] - self.w[i];
                grad += m.face[i] * d * d;
            }
        }
        (kin, grad, pot)
    }

    /// Energy of `psi = Q + w`: the exact background energy plus the discrete
    /// relative energy of w plus the boundary pairing `sinh R Q_r(R) w(R)`.
    pub fn energy(&self) -> f64 {
        let m = &self.mesh;
        let n = m.len();
        let (kin, grad, _) = self.quadratic_parts(n - 1);
        let target = self.family.target;
        let mut rel = 0.0;
        for i in 1..n {
            let w = self.w[i];
            // [g^2(Q+w) - g^2(Q)]/2 - gg'(Q) w
            let d = if self.cfg.linearized {
                0.5 * m.c2q[i] * w * w
            } else {
                let sq = match target {
                    Target::Sphere => w.sin().powi(2),
                    Target::HyperbolicPlane => w.sinh().powi(2),
                };
                let defect = double_angle_defect(target, w);
                match target {
                    Target::Sphere => 0.5 * (m.c2q[i] * sq - 0.5 * m.s2q[i] * defect),
                    Target::HyperbolicPlane => 0.5 * (m.c2q[i] * sq + 0.5 * m.s2q[i] * defect),
                }
            };
            rel += m.mass[i] * d * m.inv_sinh2[i];
        }
        self.family.energy + 0.5 * (kin + grad) + rel + m.boundary_weight * self.w[n - 1]
    }

    pub fn h0_distance(&self) -> f64 {
        let (k, g, p) = self.quadratic_parts(self.mesh.len() - 1);
        (k + g + p).sqrt()
    }

    pub fn local_energy(&self) -> f64 {
        let upto = self.mesh.r.partition_point(|&x| x <= self.cfg.local_radius).saturating_sub(1);
        let (k, g, p) = self.quadratic_parts(upto.max(1));
        0.5 * (k + g + p)
    }

    pub fn mode_amplitude(&self) -> f64 {
        match &self.mode {
            None => 0.0,
            Some(phi) => self.w.iter().zip(phi).zip(&self.mesh.mass).map(|((w, p), m)| w * p * m).sum(),
        }
    }

    pub fn s_norm_partial(&self) -> f64 {
        self.s_acc.cbrt()
    }

    pub fn diagnostics(&self) -> EvolutionDiagnostics {
        EvolutionDiagnostics {
            t: self.t,
            energy: self.energy(),
            h0_distance: self.h0_distance(),
            local_energy: self.local_energy(),
            mode_amplitude: self.mode_amplitude(),
            s_norm_partial: self.s_norm_partial(),
        }
    }

    pub fn state(&self) -> Result<WaveState> {
        let r = &self.mesh.r[1..];
        let psi: Vec<f64> = r.iter().zip(&self.w[1..]).map(|(&x, w)| self.family.value(x) + w).collect();
        Ok(WaveState {
            t: self.t,
            psi: RadialProfile::new(r.to_vec(), psi, 1.0)?,
            psi_t: RadialProfile::new(r.to_vec(), self.v[1..].to_vec(), 1.0)?,
            family: self.family,
        })
    }
}

/// Frames at the emit cadence plus the per-step diagnostic series.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolutionRun {
    pub frames: Vec<(WaveState, EvolutionDiagnostics)>,
    pub series: Vec<EvolutionDiagnostics>,
    pub relative_energy_drift: f64,
}

impl EvolutionRun {
    pub fn last(&self) -> &EvolutionDiagnostics {
        self.series.last().expect("series always holds the initial diagnostics")
    }
}

/// Advances `initial` to `t_end` with step `dt` (shortened so that it divides the interval).
pub fn evolve(
    initial: &WaveState,
    t_end: f64,
    dt: f64,
    cfg: &EvolverConfig,
    mode: Option<&RadialProfile>,
) -> Result<EvolutionRun> {
    let span = t_end - initial.t;
    if span < 0.0 {
        return Err(Error::Config("t_end precedes the initial time".into()));
    }
    let steps = (span / dt).ceil().max(1.0) as usize;
    let dt = if span == 0.0 { dt } else { span / steps as f64 };
    let mut ev = Evolver::new(initial, dt, cfg, mode)?;
    let d0 = ev.diagnostics();
    let mut series = vec![d0];
    let mut frames = vec![(ev.state()?, d0)];
    let emit_every = ((cfg.emit_interval / dt).round() as usize).max(1);
    let sample_every = ((cfg.sample_interval / dt).round() as usize).max(1);
    for k in 1..=steps {
        if span == 0.0 {
            break;
        }
        ev.step()?;
        let emit = k % emit_every == 0 || k == steps;
        if emit || k % sample_every == 0 {
            let d = ev.diagnostics();
            series.push(d);
            if emit {
                frames.push((ev.state()?, d));
            }
        }
    }
    let e0 = d0.energy;
    let drift = series.iter().map(|d| (d.energy - e0).abs()).fold(0.0, f64::max) / e0.abs().max(1e-300);
    Ok(EvolutionRun { frames, series, relative_energy_drift: drift })
}

/// Errors between successive mesh halvings and the observed order `log2(e1/e2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub coarse_error: f64,
    pub fine_error: f64,
    pub order: f64,
}

/// Runs at dr, dr/2, dr/4 (dt = cfl dr) on uniform grids with a reflecting
/// boundary and compares the perturbations at the coarse nodes in the discrete L^2(sinh r dr) norm.
pub fn convergence_study(
    family: HarmonicFamily,
    w0: impl Fn(f64) -> f64,
    t_end: f64,
    cfg: &EvolverConfig,
) -> Result<ConvergenceReport> {
    let mut sols: Vec<Vec<f64>> = Vec::new();
    let mut coarse_nodes = Vec::new();
    for k in 0..3 {
        let c = EvolverConfig {
            dr: cfg.dr / f64::from(1 << k),
            h_min: None,
            boundary: Boundary::Reflecting,
            emit_interval: t_end.max(1e-9),
            ..cfg.clone()
        };
        let nodes = c.nodes();
        let init = WaveState::perturbed(family, &nodes[1..], &w0, |_| 0.0)?;
        let mut ev = Evolver::new(&init, c.time_step(), &c, None)?;
        let steps = (t_end / c.time_step()).round() as usize;
        for _ in 0..steps {
            ev.step()?;
        }
        let stride = 1 << k;
        sols.push(ev.perturbation().iter().step_by(stride).copied().collect());
        if k == 0 {
            coarse_nodes = nodes;
        }
    }
    let weight: Vec<f64> = coarse_nodes.iter().map(|r| r.sinh()).collect();
    let dist = |a: &[f64], b: &[f64]| {
        let y: Vec<f64> = a.iter().zip(b).zip(&weight).map(|((x, y), s)| (x - y).powi(2) * s).collect();
        simpson(&coarse_nodes, &y).sqrt()
    };
    let e1 = dist(&sols[0], &sols[1]);
    let e2 = dist(&sols[1], &sols[2]);
    Ok(ConvergenceReport { coarse_error: e1, fine_error: e2, order: (e1 / e2).log2() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyFit {
    pub frequency: f64,
    /// Peak periodogram power over the median power in the scanned band.
    pub snr: f64,
}

/// Dominant angular frequency in `[omega_lo, omega_hi]` of a sampled signal,
/// from a Hann-windowed periodogram refined by golden-section search.
pub fn dominant_frequency(times: &[f64], values: &[f64], omega_lo: f64, omega_hi: f64) -> Result<FrequencyFit> {
    if times.len() != values.len() || times.len() < 16 || !(0.0 < omega_lo && omega_lo < omega_hi) {
        return Err(Error::Precondition("need >= 16 samples and 0 < omega_lo < omega_hi".into()));
    }
    let stride = (times.len() / 4000).max(1);
    let t: Vec<f64> = times.iter().step_by(stride).copied().collect();
    let x: Vec<f64> = values.iter().step_by(stride).copied().collect();
    let n = t.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let xw: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(k, v)| (v - mean) * (std::f64::consts::PI * k as f64 / (n - 1) as f64).sin().powi(2))
        .collect();
    let power = |om: f64| {
        let (mut c, mut s) = (0.0, 0.0);
        for (tk, xk) in t.iter().zip(&xw) {
            let (si, co) = (om * tk).sin_cos();
            c += xk * co;
            s += xk * si;
        }
        c * c + s * s
    };
    let span = t[n - 1] - t[0];
    let scan = (((omega_hi - omega_lo) * span / std::f64::consts::PI * 8.0).ceil() as usize).clamp(64, 20_000);
    let grid: Vec<f64> = (0..=scan).map(|k| omega_lo + (omega_hi - omega_lo) * k as f64 / scan as f64).collect();
    let p: Vec<f64> = grid.iter().map(|&o| power(o)).collect();
    let (imax, &pmax) = p.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let mut sorted = p.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let snr = if median > 0.0 { pmax / median } else if pmax > 0.0 { f64::INFINITY } else { 0.0 };
    if !(snr >= 10.0) {
        return Err(Error::Inconclusive(snr));
    }
    let (mut a, mut b) = (grid[imax.saturating_sub(1)], grid[(imax + 1).min(scan)]);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - phi * (b - a), a + phi * (b - a));
    let (mut pc, mut pd) = (power(c), power(d));
    while b - a > 1e-10 * omega_hi {
        if pc > pd {
            b = d;
            d = c;
            pd = pc;
            c = b - phi * (b - a);
            pc = power(c);
        } else {
            a = c;
            c = d;
            pc = pd;
            d = a + phi * (b - a);
            pd = power(d);
        }
    }
    Ok(FrequencyFit { frequency: 0.5 * (a + b), snr })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeExperiment {
    pub measured_frequency: f64,
    pub expected_frequency: f64,
    pub snr: f64,
    /// `(t, <u(t), phi>)` at the sampling cadence.
    pub amplitude_series: Vec<(f64, f64)>,
    pub relative_energy_drift: f64,
}

/// Projection series of the perturbation `epsilon phi / sinh^{1/2} r` onto `phi`.
pub fn mode_amplitude_series(
    lambda: f64,
    eigen: &SpectralResult,
    epsilon: f64,
    t_end: f64,
    cfg: &EvolverConfig,
) -> Result<(Vec<(f64, f64)>, f64)> {
    let family = HarmonicFamily::new(Target::Sphere, lambda)?;
    let phi = &eigen.eigenfunction;
    let nodes = cfg.nodes();
    let w0 = |r: f64| epsilon * phi.value_at(r).unwrap_or(0.0) / r.sinh().sqrt();
    let init = WaveState::perturbed(family, &nodes[1..], w0, |_| 0.0)?;
    let cfg = EvolverConfig { emit_interval: t_end.max(1e-9), ..cfg.clone() };
    let run = evolve(&init, t_end, cfg.time_step(), &cfg, Some(phi))?;
    Ok((run.series.iter().map(|d| (d.t, d.mode_amplitude)).collect(), run.relative_energy_drift))
}

/// Evolves `Q + epsilon sinh r phi_4d` from rest and fits the frequency of the mode projection.
pub fn internal_mode_experiment(
    lambda: f64,
    eigen: &SpectralResult,
    epsilon: f64,
    t_end: f64,
    cfg: &EvolverConfig,
) -> Result<ModeExperiment> {
    let (series, drift) = mode_amplitude_series(lambda, eigen, epsilon, t_end, cfg)?;
    let t: Vec<f64> = series.iter().map(|x| x.0).collect();
    let a: Vec<f64> = series.iter().map(|x| x.1).collect();
    let expected = eigen.mu_sq.sqrt();
    let fit = dominant_frequency(&t, &a, 0.05, 2.0)?;
    Ok(ModeExperiment {
        measured_frequency: fit.frequency,
        expected_frequency: expected,
        snr: fit.snr,
        amplitude_series: series,
        relative_energy_drift: drift,
    })
}
