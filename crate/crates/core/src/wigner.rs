//! Wigner functions on a phase-space grid and their Moyal evolution under
//! quadratic Hamiltonians.
//!
//! ```text
//! f(x, p) = (1/2pi) int psi*(x - hbar y/2) exp(-i y p) psi(x + hbar y/2) dy
//! d/dt f  = dH/dx df/dp - dH/dp df/dx
//! ```
//!
//! The evolution is the Hamiltonian flow (`dx/dt = dH/dp`); for `deg H <= 2` every
//! higher Moyal term vanishes, so this is exact.

use num_complex::Complex;
use num_traits::{Float, FloatConst};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::phase::{Derivation, PhasePoly};
use crate::ring::ExactScalar;

fn c<F: Float>(v: f64) -> F {
    F::from(v).expect("constant representable")
}

/// Named wave-function families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum WaveFamily<F> {
    /// `(pi w^2)^{-1/4} exp(-(x - center)^2 / (2 w^2)) exp(i momentum x / hbar)`
    Gaussian { center: F, width: F, momentum: F },
    /// Harmonic-oscillator eigenstate `n` (unit mass and frequency).
    HermiteGaussian { n: u32 },
}

/// An L2-normalized wave function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WaveFn<F> {
    pub family: WaveFamily<F>,
    pub hbar: F,
}

impl<F: Float + FloatConst> WaveFn<F> {
    pub fn gaussian(center: F, width: F, momentum: F, hbar: F) -> Result<Self> {
        if !(width > F::zero()) {
            return Err(Error::OutOfRange("gaussian width must be positive".into()));
        }
        Self::checked(WaveFamily::Gaussian { center, width, momentum }, hbar)
    }

    pub fn hermite(n: u32, hbar: F) -> Result<Self> {
        Self::checked(WaveFamily::HermiteGaussian { n }, hbar)
    }

    fn checked(family: WaveFamily<F>, hbar: F) -> Result<Self> {
        if !(hbar > F::zero()) {
            return Err(Error::OutOfRange("hbar must be positive".into()));
        }
        Ok(Self { family, hbar })
    }

    pub fn eval(&self, x: F) -> Complex<F> {
        match self.family {
            WaveFamily::Gaussian { center, width, momentum } => {
                let u = (x - center) / width;
                let amp = (F::PI() * width * width).powf(c(-0.25)) * (-u * u / c(2.0)).exp();
                Complex::from_polar(amp, momentum * x / self.hbar)
            }
            WaveFamily::HermiteGaussian { n } => {
                let s = self.hbar.sqrt();
                Complex::new(hermite_function(n, x / s) / s.sqrt(), F::zero())
            }
        }
    }

    /// Whether `psi(-x) = psi(x)`.
    pub fn is_even(&self) -> bool {
        match self.family {
            WaveFamily::Gaussian { center, momentum, .. } => center.is_zero() && momentum.is_zero(),
            WaveFamily::HermiteGaussian { n } => n % 2 == 0,
        }
    }

    /// Radius around the centre beyond which `|psi|` stays below `tol`.
    fn support_radius(&self, tol: F) -> F {
        let (center, scale) = match self.family {
            WaveFamily::Gaussian { center, width, .. } => (center, width),
            WaveFamily::HermiteGaussian { n } => {
                let s = self.hbar.sqrt();
                (F::zero(), s * (c::<F>(2.0) * F::from(n).unwrap() + F::one()).sqrt().max(F::one()))
            }
        };
        let step = scale / c(4.0);
        let mut r = scale;
        while self.eval(center + r).norm() > tol || self.eval(center - r).norm() > tol {
            r = r + step;
        }
        center.abs() + r
    }

    /// Radius in `p` outside which the Wigner function is negligible.
    fn momentum_radius(&self) -> F {
        match self.family {
            WaveFamily::Gaussian { width, momentum, .. } => momentum.abs() + c::<F>(10.0) * self.hbar / width,
            WaveFamily::HermiteGaussian { n } => {
                (c::<F>(2.0) * F::from(n).unwrap() + F::one()).sqrt() * self.hbar.sqrt()
                    + c::<F>(10.0) * self.hbar.sqrt()
            }
        }
    }

    /// Closed-form Wigner function of the family.
    pub fn wigner_closed_form(&self, x: F, p: F) -> F {
        let hbar = self.hbar;
        match self.family {
            WaveFamily::Gaussian { center, width, momentum } => {
                let u = (x - center) / width;
                let v = width * (p - momentum) / hbar;
                (-u * u - v * v).exp() / (F::PI() * hbar)
            }
            WaveFamily::HermiteGaussian { n } => {
                let r2 = (x * x + p * p) / hbar;
                let sign = if n % 2 == 0 { F::one() } else { -F::one() };
                sign * (-r2).exp() * laguerre(n, r2 + r2) / (F::PI() * hbar)
            }
        }
    }
}

/// Normalized Hermite function `phi_n(u)`, by the stable three-term recurrence.
fn hermite_function<F: Float + FloatConst>(n: u32, u: F) -> F {
    let mut prev = F::zero();
    let mut cur = F::PI().powf(c(-0.25)) * (-u * u / c(2.0)).exp();
    for k in 0..n {
        let kf = F::from(k).unwrap();
        let next = (c::<F>(2.0) / (kf + F::one())).sqrt() * u * cur - (kf / (kf + F::one())).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn laguerre<F: Float>(n: u32, z: F) -> F {
    let (mut prev, mut cur) = (F::zero(), F::one());
    for k in 0..n {
        let kf = F::from(k).unwrap();
        let next = ((kf + kf + F::one() - z) * cur - kf * prev) / (kf + F::one());
        prev = cur;
        cur = next;
    }
    cur
}

/// Square grid layout: `n` points per axis on `[-lx, lx] x [-lp, lp]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseGridSpec<F> {
    pub lx: F,
    pub lp: F,
    pub n: usize,
}

impl<F: Float> PhaseGridSpec<F> {
    pub fn new(lx: F, lp: F, n: usize) -> Result<Self> {
        if n < 5 || !(lx > F::zero()) || !(lp > F::zero()) {
            return Err(Error::OutOfRange("grid needs n >= 5 and positive half-widths".into()));
        }
        Ok(Self { lx, lp, n })
    }

    pub fn hx(&self) -> F {
        (self.lx + self.lx) / F::from(self.n - 1).unwrap()
    }

    pub fn hp(&self) -> F {
        (self.lp + self.lp) / F::from(self.n - 1).unwrap()
    }

    pub fn x(&self, i: usize) -> F {
        -self.lx + self.hx() * F::from(i).unwrap()
    }

    pub fn p(&self, j: usize) -> F {
        -self.lp + self.hp() * F::from(j).unwrap()
    }
}

/// Values on a [`PhaseGridSpec`], row-major: `values[i * n + j]` at `(x_i, p_j)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseGrid<F> {
    pub spec: PhaseGridSpec<F>,
    pub values: Vec<F>,
}

impl<F: Float + Send + Sync> PhaseGrid<F> {
    pub fn from_fn(spec: PhaseGridSpec<F>, f: impl Fn(F, F) -> F + Sync) -> Self {
        let n = spec.n;
        let mut values = vec![F::zero(); n * n];
        values.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let x = spec.x(i);
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(x, spec.p(j));
            }
        });
        Self { spec, values }
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.values[i * self.spec.n + j]
    }

    /// Trapezoidal `int int f dx dp`.
    pub fn mass(&self) -> F {
        let n = self.spec.n;
        let half = c::<F>(0.5);
        let edge = |k: usize| if k == 0 || k == n - 1 { half } else { F::one() };
        let rows: Vec<F> = (0..n)
            .map(|i| {
                let row: Vec<F> = (0..n).map(|j| self.get(i, j) * edge(j)).collect();
                pairwise_sum(&row, F::zero()) * edge(i)
            })
            .collect();
        pairwise_sum(&rows, F::zero()) * self.spec.hx() * self.spec.hp()
    }

    pub fn min(&self) -> F {
        self.values.iter().copied().fold(F::infinity(), F::min)
    }

    pub fn max(&self) -> F {
        self.values.iter().copied().fold(F::neg_infinity(), F::max)
    }

    /// `max |self - reference|` over the grid.
    pub fn linf_distance(&self, reference: impl Fn(F, F) -> F) -> F {
        let n = self.spec.n;
        let mut worst = F::zero();
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.get(i, j) - reference(self.spec.x(i), self.spec.p(j))).abs());
            }
        }
        worst
    }
}

/// Quadrature controls for [`wigner_transform`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WignerOptions<F> {
    /// Half-width `Y` of the `y` window; chosen from the wave function's support when `None`.
    pub window: Option<F>,
    /// Node spacing in `y`; chosen to resolve `exp(-i y p)` on the grid when `None`.
    pub step: Option<F>,
    /// Largest integrand magnitude tolerated at the window edge.
    pub tol: F,
}

impl<F: Float> Default for WignerOptions<F> {
    fn default() -> Self {
        Self { window: None, step: None, tol: c(1e-12) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WignerResult<F> {
    pub grid: PhaseGrid<F>,
    /// Largest imaginary part met before taking the real part.
    pub imag_residue: F,
    pub window: F,
    pub nodes: usize,
}

/// Trapezoidal Wigner transform of `psi` on `spec`, parallel over `x` rows.
pub fn wigner_transform<F: Float + FloatConst + Send + Sync>(
    psi: &WaveFn<F>,
    spec: PhaseGridSpec<F>,
    opts: &WignerOptions<F>,
) -> Result<WignerResult<F>> {
    let hbar = psi.hbar;
    let two = c::<F>(2.0);
    let window = match opts.window {
        Some(w) => w,
        None => two * psi.support_radius(c(1e-17)) / hbar,
    };
    let step = opts.step.unwrap_or_else(|| F::PI() / (spec.lp + psi.momentum_radius()));
    let half_nodes = (window / step).ceil().to_usize().unwrap_or(0).max(1);
    let step = window / F::from(half_nodes).unwrap();
    let ys: Vec<F> =
        (0..=2 * half_nodes).map(|k| step * (F::from(k).unwrap() - F::from(half_nodes).unwrap())).collect();
    let last = ys.len() - 1;

    let edge = (0..spec.n)
        .map(|i| {
            let x = spec.x(i);
            let a = (psi.eval(x - hbar * window / two).conj() * psi.eval(x + hbar * window / two)).norm();
            let b = (psi.eval(x + hbar * window / two).conj() * psi.eval(x - hbar * window / two)).norm();
            a.max(b)
        })
        .fold(F::zero(), F::max);
    if edge > opts.tol {
        return Err(Error::WindowTooSmall { magnitude: edge.to_f64().unwrap_or(f64::NAN) });
    }

    let phases: Vec<Complex<F>> = (0..spec.n)
        .flat_map(|j| {
            let p = spec.p(j);
            ys.iter().map(move |&y| Complex::from_polar(F::one(), -y * p))
        })
        .collect();
    let norm = step / (two * F::PI());
    let n = spec.n;
    let mut values = vec![F::zero(); n * n];
    let residues: Vec<F> = values
        .par_chunks_mut(n)
        .enumerate()
        .map(|(i, row)| {
            let x = spec.x(i);
            let kernel: Vec<Complex<F>> = ys
                .iter()
                .enumerate()
                .map(|(k, &y)| {
                    let w = if k == 0 || k == last { c(0.5) } else { F::one() };
                    (psi.eval(x - hbar * y / two).conj() * psi.eval(x + hbar * y / two)).scale(w)
                })
                .collect();
            let mut terms = vec![Complex::new(F::zero(), F::zero()); ys.len()];
            let mut residue = F::zero();
            for (j, v) in row.iter_mut().enumerate() {
                let ph = &phases[j * ys.len()..(j + 1) * ys.len()];
                for ((t, k), e) in terms.iter_mut().zip(&kernel).zip(ph) {
                    *t = *k * *e;
                }
                let s = pairwise_sum(&terms, Complex::new(F::zero(), F::zero())).scale(norm);
                *v = s.re;
                residue = residue.max(s.im.abs());
            }
            residue
        })
        .collect();
    Ok(WignerResult {
        grid: PhaseGrid { spec, values },
        imag_residue: residues.into_iter().fold(F::zero(), F::max),
        window,
        nodes: ys.len(),
    })
}

/// Largest-eigenvalue bound of the fourth-order central difference, times the grid step.
const D4_SPECTRAL_RADIUS: f64 = 1.372;
/// RK4 stability limit along the imaginary axis (slightly below `2 sqrt 2`).
const RK4_IMAGINARY_LIMIT: f64 = 2.8;

/// Linear velocity component `c0 + cx x + cp p`.
#[derive(Clone, Copy, Debug)]
struct Affine<F> {
    c0: F,
    cx: F,
    cp: F,
}

impl<F: Float> Affine<F> {
    fn at(&self, x: F, p: F) -> F {
        self.c0 + self.cx * x + self.cp * p
    }

    fn from_poly<T: ExactScalar>(g: &PhasePoly<T>, scale: F) -> Result<Self> {
        let mut a = Affine { c0: F::zero(), cx: F::zero(), cp: F::zero() };
        for (&e, coeff) in g.terms() {
            let v = coeff
                .as_constant()
                .ok_or_else(|| Error::Hamiltonian("coefficients must be plain rationals (no q, kappa)".into()))?
                .to_f64();
            let v = F::from(v).unwrap() * scale;
            match e {
                (0, 0) => a.c0 = v,
                (1, 0) => a.cx = v,
                (0, 1) => a.cp = v,
                _ => unreachable!("derivative of a quadratic"),
            }
        }
        Ok(a)
    }
}

/// Velocity field `(dH/dp, -dH/dx)` of a polynomial Hamiltonian of degree at most two.
fn velocity<T: ExactScalar, F: Float>(h: &PhasePoly<T>) -> Result<(Affine<F>, Affine<F>)> {
    if h.has_negative_exponents() || h.total_degree().is_some_and(|d| d > 2) {
        return Err(Error::Hamiltonian(
            "only polynomial Hamiltonians of degree <= 2 evolve exactly (all higher Moyal terms vanish)".into(),
        ));
    }
    let vx = Affine::from_poly(&h.apply(Derivation::Dp)?, F::one())?;
    let vp = Affine::from_poly(&h.apply(Derivation::Dx)?, -F::one())?;
    Ok((vx, vp))
}

/// Fourth-order central first derivative along one axis; zero beyond the boundary.
fn d4<F: Float>(v: &[F], stride: usize, count: usize, base: usize, k: usize, inv12h: F) -> F {
    let at = |o: isize| -> F {
        let idx = k as isize + o;
        if idx < 0 || idx >= count as isize {
            F::zero()
        } else {
            v[base + idx as usize * stride]
        }
    };
    (at(-2) - at(2) + c::<F>(8.0) * (at(1) - at(-1))) * inv12h
}

fn rhs<F: Float + Send + Sync>(spec: &PhaseGridSpec<F>, vx: &Affine<F>, vp: &Affine<F>, f: &[F], out: &mut [F]) {
    let n = spec.n;
    let ix = F::one() / (c::<F>(12.0) * spec.hx());
    let ip = F::one() / (c::<F>(12.0) * spec.hp());
    out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let x = spec.x(i);
        for (j, o) in row.iter_mut().enumerate() {
            let p = spec.p(j);
            let dfx = d4(f, n, n, j, i, ix);
            let dfp = d4(f, 1, n, i * n, j, ip);
            *o = -(vx.at(x, p) * dfx + vp.at(x, p) * dfp);
        }
    });
}

/// Largest stable step for the grid and Hamiltonian.
pub fn cfl_limit<T: ExactScalar, F: Float>(spec: &PhaseGridSpec<F>, h: &PhasePoly<T>) -> Result<F> {
    let (vx, vp) = velocity::<T, F>(h)?;
    let corner = |a: &Affine<F>| {
        [(-spec.lx, -spec.lp), (-spec.lx, spec.lp), (spec.lx, -spec.lp), (spec.lx, spec.lp)]
            .iter()
            .map(|&(x, p)| a.at(x, p).abs())
            .fold(F::zero(), F::max)
    };
    let rate = c::<F>(D4_SPECTRAL_RADIUS) * (corner(&vx) / spec.hx() + corner(&vp) / spec.hp());
    Ok(if rate.is_zero() { F::infinity() } else { c::<F>(RK4_IMAGINARY_LIMIT) / rate })
}

/// Integrates `df/dt = {H, f}` with RK4 from `0` to `t_end`, calling `observe(t, f)` after
/// every step (and once at `t = 0`). The step is shrunk to land on `t_end` exactly.
pub fn moyal_evolve_observed<T: ExactScalar, F: Float + Send + Sync>(
    f0: &PhaseGrid<F>,
    h: &PhasePoly<T>,
    t_end: F,
    dt: F,
    mut observe: impl FnMut(F, &PhaseGrid<F>),
) -> Result<PhaseGrid<F>> {
    if !(dt > F::zero()) || t_end < F::zero() {
        return Err(Error::OutOfRange("need dt > 0 and t_end >= 0".into()));
    }
    let (vx, vp) = velocity::<T, F>(h)?;
    let limit = cfl_limit::<T, F>(&f0.spec, h)?;
    if dt > limit {
        return Err(Error::Cfl { dt: dt.to_f64().unwrap_or(f64::NAN), limit: limit.to_f64().unwrap_or(f64::NAN) });
    }
    let mut f = f0.clone();
    observe(F::zero(), &f);
    let steps = (t_end / dt).ceil().to_usize().unwrap_or(0);
    if steps == 0 {
        return Ok(f);
    }
    let dt = t_end / F::from(steps).unwrap();
    let spec = f0.spec;
    let len = f.values.len();
    let (mut k1, mut k2, mut k3, mut k4) =
        (vec![F::zero(); len], vec![F::zero(); len], vec![F::zero(); len], vec![F::zero(); len]);
    let mut tmp = vec![F::zero(); len];
    let half = dt / c(2.0);
    for s in 0..steps {
        rhs(&spec, &vx, &vp, &f.values, &mut k1);
        axpy(&f.values, half, &k1, &mut tmp);
        rhs(&spec, &vx, &vp, &tmp, &mut k2);
        axpy(&f.values, half, &k2, &mut tmp);
        rhs(&spec, &vx, &vp, &tmp, &mut k3);
        axpy(&f.values, dt, &k3, &mut tmp);
        rhs(&spec, &vx, &vp, &tmp, &mut k4);
        let sixth = dt / c(6.0);
        let two = c::<F>(2.0);
        for (idx, v) in f.values.iter_mut().enumerate() {
            *v = *v + sixth * (k1[idx] + two * (k2[idx] + k3[idx]) + k4[idx]);
        }
        observe(dt * F::from(s + 1).unwrap(), &f);
    }
    Ok(f)
}

fn axpy<F: Float>(y: &[F], a: F, x: &[F], out: &mut [F]) {
    for ((o, &yi), &xi) in out.iter_mut().zip(y).zip(x) {
        *o = yi + a * xi;
    }
}

/// [`moyal_evolve_observed`] without an observer.
pub fn moyal_evolve<T: ExactScalar, F: Float + Send + Sync>(
    f0: &PhaseGrid<F>,
    h: &PhasePoly<T>,
    t_end: F,
    dt: F,
) -> Result<PhaseGrid<F>> {
    moyal_evolve_observed(f0, h, t_end, dt, |_, _| {})
}

/// Exact solution of the harmonic-oscillator flow `H = (x^2 + p^2)/2`:
/// the initial density carried along a clockwise rotation by `t`.
pub fn harmonic_rotation<F: Float>(f0: impl Fn(F, F) -> F, t: F) -> impl Fn(F, F) -> F {
    let (s, co) = t.sin_cos();
    move |x, p| f0(x * co - p * s, p * co + x * s)
}
