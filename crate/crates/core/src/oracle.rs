//! Exact density-matrix evolution of the cavity ⊗ emitters system for up to
//! three emitters in a truncated Fock space.
//!
//! Basis ordering is Fock index major, spin bit-string minor: the basis
//! index of |n⟩⊗|s₁…s_N⟩ is `n·2^N + bits`, where site 1 is the most
//! significant bit and a set bit means the excited state |e⟩.
//!
//! The rotating-frame Hamiltonian is
//!
//! ```text
//! H = Δc a†a + (Δ₀/2) Σ σkz + g₁ Σ i(a + a†)(σk − σk†) + (Ω/2) Σ (σk + σk†)
//! ```
//!
//! with dissipators D[√(2κ(n̄+1)) a], D[√(2κn̄) a†], D[√(γ₁(n̄+1)) σk],
//! D[√(γ₁n̄) σk†] and D[√(γ₂*/2) σkz].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{IntegrationError, OracleError};
use crate::integrator::{uniform_times, IntegrationConfig};
use crate::model::MomentModel;
use crate::moments::{initial_thermal_state, Moment, MomentState, MOMENT_COUNT};
use crate::observables::{min_cavity_quadrature, min_ensemble_quadrature, spin_metrics};
use crate::ode::{self, FailureKind, OdeSystem, SolverOptions};
use crate::params::SystemParams;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Photon-number cutoff; the Fock space holds |0⟩…|n_max⟩.
    pub n_max: usize,
    pub n_spins: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_end: f64,
    pub sample_count: usize,
    /// Upper bound on the Hilbert-space dimension.
    pub dim_cap: usize,
    /// Largest tolerated population of |n_max⟩ before the truncation is
    /// declared too small.
    pub truncation_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            n_max: 15,
            n_spins: 1,
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            t_end: 50.0,
            sample_count: 501,
            dim_cap: 4096,
            truncation_tol: 1e-6,
        }
    }
}

impl OracleConfig {
    pub fn dim(&self) -> usize {
        (self.n_max + 1) << self.n_spins
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        if self.n_max < 1 {
            return Err(OracleError::InvalidConfig("n_max must be at least 1"));
        }
        if !(1..=3).contains(&self.n_spins) {
            return Err(OracleError::InvalidConfig("n_spins must be 1, 2 or 3"));
        }
        if self.dim() > self.dim_cap {
            return Err(OracleError::DimensionCap { dim: self.dim(), cap: self.dim_cap });
        }
        if self.sample_count < 2 || !(self.t_end > 0.0) {
            return Err(OracleError::InvalidConfig("need t_end > 0 and sample_count >= 2"));
        }
        Ok(())
    }
}

/// Row-oriented sparse complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    pub dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseOp {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, rows: vec![Vec::new(); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            m.rows[r].push((r, ONE));
        }
        m
    }

    pub fn push(&mut self, row: usize, col: usize, v: Complex64) {
        if v == ZERO {
            return;
        }
        match self.rows[row].iter_mut().find(|(c, _)| *c == col) {
            Some(e) => e.1 += v,
            None => self.rows[row].push((col, v)),
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.rows[row].iter().find(|(c, _)| *c == col).map_or(ZERO, |e| e.1)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m.push(c, r, v.conj());
            }
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.dim);
        for (r, row) in self.rows.iter().enumerate() {
            for &(k, a) in row {
                for &(c, b) in &other.rows[k] {
                    m.push(r, c, a * b);
                }
            }
        }
        m
    }

    pub fn add_scaled(&mut self, other: &Self, s: Complex64) {
        for (r, row) in other.rows.iter().enumerate() {
            for &(c, v) in row {
                self.push(r, c, s * v);
            }
        }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut m = Self::zeros(self.dim);
        m.add_scaled(self, s);
        m
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m[(r, c)] += v;
            }
        }
        m
    }

    /// out = self · rho  (row-major dense rho)
    fn left_mul(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        out.fill(ZERO);
        for (r, row) in self.rows.iter().enumerate() {
            let dst = &mut out[r * d..(r + 1) * d];
            for &(k, v) in row {
                let src = &rho[k * d..(k + 1) * d];
                for (o, s) in dst.iter_mut().zip(src) {
                    *o += v * s;
                }
            }
        }
    }

    /// out += m · self†  (row-major dense m)
    fn right_mul_adjoint_add(&self, m: &[Complex64], out: &mut [Complex64], scale: Complex64) {
        let d = self.dim;
        for (c, row) in self.rows.iter().enumerate() {
            for &(k, v) in row {
                let f = scale * v.conj();
                for r in 0..d {
                    out[r * d + c] += m[r * d + k] * f;
                }
            }
        }
    }

    /// tr(self · rho)
    pub fn expect(&self, rho: &DensityMatrix) -> Complex64 {
        let d = self.dim;
        let mut acc = ZERO;
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                acc += v * rho.data[c * d + r];
            }
        }
        acc
    }
}

/// Operator factory on the joint basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Basis {
    pub n_max: usize,
    pub n_spins: usize,
}

impl Basis {
    pub fn dim(&self) -> usize {
        (self.n_max + 1) << self.n_spins
    }

    fn spin_states(&self) -> usize {
        1 << self.n_spins
    }

    /// Bit mask of site `k` (0-based).
    fn site_mask(&self, k: usize) -> usize {
        1 << (self.n_spins - 1 - k)
    }

    pub fn index(&self, n: usize, bits: usize) -> usize {
        n * self.spin_states() + bits
    }

    pub fn destroy(&self) -> SparseOp {
        let mut m = SparseOp::zeros(self.dim());
        for n in 1..=self.n_max {
            for b in 0..self.spin_states() {
                m.push(self.index(n - 1, b), self.index(n, b), Complex64::new((n as f64).sqrt(), 0.0));
            }
        }
        m
    }

    /// σ = |g⟩⟨e| on site k.
    pub fn lower(&self, k: usize) -> SparseOp {
        let mask = self.site_mask(k);
        let mut m = SparseOp::zeros(self.dim());
        for n in 0..=self.n_max {
            for b in 0..self.spin_states() {
                if b & mask != 0 {
                    m.push(self.index(n, b & !mask), self.index(n, b), ONE);
                }
            }
        }
        m
    }

    pub fn sigma_z(&self, k: usize) -> SparseOp {
        let mask = self.site_mask(k);
        let mut m = SparseOp::zeros(self.dim());
        for n in 0..=self.n_max {
            for b in 0..self.spin_states() {
                let v = if b & mask != 0 { 1.0 } else { -1.0 };
                m.push(self.index(n, b), self.index(n, b), Complex64::new(v, 0.0));
            }
        }
        m
    }
}

/// Dense density matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub basis: Basis,
    pub data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim() + c]
    }

    /// Pure state |ψ⟩⟨ψ| from an (unnormalised) amplitude vector.
    pub fn pure(basis: Basis, psi: &[Complex64]) -> Self {
        let d = basis.dim();
        assert_eq!(psi.len(), d);
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        let mut data = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                data[r * d + c] = psi[r] * psi[c].conj() / norm;
            }
        }
        Self { basis, data }
    }

    /// Product of a cavity state diagonal in Fock space and independent
    /// spins, each with excited population `p_excited`.
    pub fn product_diagonal(basis: Basis, fock_populations: &[f64], p_excited: f64) -> Self {
        let d = basis.dim();
        let mut data = vec![ZERO; d * d];
        let total: f64 = fock_populations.iter().take(basis.n_max + 1).sum();
        for n in 0..=basis.n_max {
            let pn = fock_populations.get(n).copied().unwrap_or(0.0) / total;
            for b in 0..basis.spin_states() {
                let ones = b.count_ones() as i32;
                let ps = p_excited.powi(ones) * (1.0 - p_excited).powi(basis.n_spins as i32 - ones);
                let i = basis.index(n, b);
                data[i * d + i] = Complex64::new(pn * ps, 0.0);
            }
        }
        Self { basis, data }
    }

    /// Thermal cavity (occupation n̄, truncated and renormalised) with
    /// maximally mixed emitters, so ⟨σz⟩ = 0.
    pub fn thermal(basis: Basis, n_bar: f64) -> Self {
        let pops: Vec<f64> = (0..=basis.n_max)
            .map(|n| {
                if n_bar == 0.0 {
                    if n == 0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    (n_bar / (1.0 + n_bar)).powi(n as i32) / (1.0 + n_bar)
                }
            })
            .collect();
        Self::product_diagonal(basis, &pops, 0.5)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.at(i, i)).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut e: f64 = 0.0;
        for r in 0..d {
            for c in r..d {
                e = e.max((self.at(r, c) - self.at(c, r).conj()).norm());
            }
        }
        e
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |r, c| self.at(r, c))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = self.to_dense();
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn purity(&self) -> f64 {
        let d = self.dim();
        let mut s = 0.0;
        for r in 0..d {
            for c in 0..d {
                s += (self.at(r, c) * self.at(c, r)).re;
            }
        }
        s
    }

    /// Population of the highest retained Fock level.
    pub fn top_fock_population(&self) -> f64 {
        let b = self.basis;
        (0..b.spin_states())
            .map(|s| {
                let i = b.index(b.n_max, s);
                self.at(i, i).re
            })
            .sum()
    }
}

/// Lindblad generator in the form dρ = −i(H_eff ρ − ρ H_eff†) + Σ L ρ L†.
#[derive(Debug, Clone)]
pub struct Generator {
    pub basis: Basis,
    pub hamiltonian: SparseOp,
    pub collapse: Vec<SparseOp>,
    h_eff: SparseOp,
}

/// Assembles the rotating-frame generator for `params` on the configured basis.
pub fn build_generator(params: &SystemParams, cfg: &OracleConfig) -> Result<Generator, OracleError> {
    cfg.validate()?;
    params.validate()?;
    Ok(generator_on(params, Basis { n_max: cfg.n_max, n_spins: cfg.n_spins }))
}

fn generator_on(p: &SystemParams, basis: Basis) -> Generator {
    let d = basis.dim();
    let a = basis.destroy();
    let ad = a.adjoint();
    let re = |x: f64| Complex64::new(x, 0.0);

    let mut h = SparseOp::zeros(d);
    h.add_scaled(&ad.mul(&a), re(p.delta_c));
    let mut field = a.clone();
    field.add_scaled(&ad, ONE);
    let mut collapse = vec![a.scaled(re((2.0 * p.kappa * (p.n_bar + 1.0)).sqrt()))];
    if p.n_bar > 0.0 {
        collapse.push(ad.scaled(re((2.0 * p.kappa * p.n_bar).sqrt())));
    }
    for k in 0..basis.n_spins {
        let s = basis.lower(k);
        let sd = s.adjoint();
        let sz = basis.sigma_z(k);
        h.add_scaled(&sz, re(0.5 * p.delta0));
        let mut diff = s.clone();
        diff.add_scaled(&sd, -ONE);
        h.add_scaled(&field.mul(&diff), I * p.g1);
        h.add_scaled(&s, re(0.5 * p.omega_rabi));
        h.add_scaled(&sd, re(0.5 * p.omega_rabi));
        collapse.push(s.scaled(re((p.gamma1 * (p.n_bar + 1.0)).sqrt())));
        if p.n_bar > 0.0 {
            collapse.push(sd.scaled(re((p.gamma1 * p.n_bar).sqrt())));
        }
        if p.gamma2_star > 0.0 {
            collapse.push(sz.scaled(re((0.5 * p.gamma2_star).sqrt())));
        }
    }
    collapse.retain(|l| l.nnz() > 0 && l.rows.iter().flatten().any(|e| e.1 != ZERO));
    let mut h_eff = h.clone();
    for l in &collapse {
        h_eff.add_scaled(&l.adjoint().mul(l), Complex64::new(0.0, -0.5));
    }
    Generator { basis, hamiltonian: h, collapse, h_eff }
}

impl Generator {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// out = L[rho]; `scratch` must have dim² entries.
    pub fn apply(&self, rho: &[Complex64], out: &mut [Complex64], scratch: &mut [Complex64]) {
        // −i H_eff ρ
        self.h_eff.left_mul(rho, scratch);
        for (o, s) in out.iter_mut().zip(scratch.iter()) {
            *o = -I * s;
        }
        // + i ρ H_eff†
        self.h_eff.right_mul_adjoint_add(rho, out, I);
        for l in &self.collapse {
            l.left_mul(rho, scratch);
            l.right_mul_adjoint_add(scratch, out, ONE);
        }
    }

    /// Dense superoperator acting on row-major vectorised ρ. Only sensible
    /// for small dimensions.
    pub fn superoperator(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        let d2 = d * d;
        let mut s = DMatrix::zeros(d2, d2);
        let mut e = vec![ZERO; d2];
        let mut out = vec![ZERO; d2];
        let mut scratch = vec![ZERO; d2];
        for j in 0..d2 {
            e[j] = ONE;
            self.apply(&e, &mut out, &mut scratch);
            for i in 0..d2 {
                s[(i, j)] = out[i];
            }
            e[j] = ZERO;
        }
        s
    }

    /// Stationary state from the null space of the superoperator, with the
    /// trace condition replacing one equation.
    pub fn steady_state(&self) -> Option<DensityMatrix> {
        let d = self.dim();
        let mut s = self.superoperator();
        let d2 = d * d;
        let row = 0;
        for j in 0..d2 {
            s[(row, j)] = ZERO;
        }
        for i in 0..d {
            s[(row, i * d + i)] = ONE;
        }
        let mut rhs = DVector::zeros(d2);
        rhs[row] = ONE;
        let x = s.lu().solve(&rhs)?;
        Some(DensityMatrix { basis: self.basis, data: x.iter().cloned().collect() })
    }
}

struct PackedGenerator<'a> {
    gen: &'a Generator,
    scratch: std::cell::RefCell<(Vec<Complex64>, Vec<Complex64>, Vec<Complex64>)>,
}

impl OdeSystem for PackedGenerator<'_> {
    fn dim(&self) -> usize {
        2 * self.gen.dim() * self.gen.dim()
    }
    fn eval(&self, y: &[f64], dy: &mut [f64]) {
        let mut guard = self.scratch.borrow_mut();
        let (rho, out, scratch) = &mut *guard;
        for (i, c) in rho.iter_mut().enumerate() {
            *c = Complex64::new(y[2 * i], y[2 * i + 1]);
        }
        self.gen.apply(rho, out, scratch);
        for (i, c) in out.iter().enumerate() {
            dy[2 * i] = c.re;
            dy[2 * i + 1] = c.im;
        }
    }
}

/// Density matrices sampled on a uniform grid.
#[derive(Debug, Clone)]
pub struct OracleTrace {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

/// Tolerances of the per-sample invariant monitor.
pub const TRACE_TOL: f64 = 1e-8;
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Propagates the master equation and checks trace, Hermiticity,
/// positivity and Fock truncation at every sample.
pub fn evolve(
    rho0: &DensityMatrix,
    generator: &Generator,
    cfg: &OracleConfig,
) -> Result<OracleTrace, OracleError> {
    let d = generator.dim();
    let d2 = d * d;
    let sys = PackedGenerator {
        gen: generator,
        scratch: std::cell::RefCell::new((vec![ZERO; d2], vec![ZERO; d2], vec![ZERO; d2])),
    };
    let mut y0 = vec![0.0; 2 * d2];
    for (i, c) in rho0.data.iter().enumerate() {
        y0[2 * i] = c.re;
        y0[2 * i + 1] = c.im;
    }
    let times = uniform_times(cfg.t_end, cfg.sample_count);
    let opts = SolverOptions {
        rel_tol: cfg.rel_tol,
        abs_tol: cfg.abs_tol,
        stiffness_switching: false,
        ..Default::default()
    };
    let mut out = OracleTrace { times: Vec::new(), states: Vec::new() };
    let mut breach: Option<(f64, String)> = None;
    let result = ode::solve_sampled(&sys, &y0, &times, &opts, |i, y| {
        let data: Vec<Complex64> = (0..d2).map(|k| Complex64::new(y[2 * k], y[2 * k + 1])).collect();
        let rho = DensityMatrix { basis: generator.basis, data };
        if let Some(what) = invariant_breach(&rho, cfg) {
            breach = Some((times[i], what));
            return false;
        }
        out.times.push(times[i]);
        out.states.push(rho);
        true
    });
    if let Some((t, what)) = breach {
        return Err(OracleError::TruncationTooSmall { t, what, n_max: generator.basis.n_max });
    }
    if let Err(f) = result {
        let partial = Box::new(crate::integrator::Trace {
            times: Vec::new(),
            states: Vec::new(),
            flags: Vec::new(),
            stats: f.stats,
        });
        return Err(OracleError::Integration(match f.kind {
            FailureKind::StepUnderflow => IntegrationError::StepUnderflow { t: f.t, partial },
            FailureKind::NonFinite => IntegrationError::NonFinite { t: f.t, partial },
            FailureKind::TooManySteps => IntegrationError::TooManySteps { t: f.t, partial },
        }));
    }
    Ok(out)
}

fn invariant_breach(rho: &DensityMatrix, cfg: &OracleConfig) -> Option<String> {
    let tr = rho.trace();
    if (tr - ONE).norm() > TRACE_TOL {
        return Some(format!("|Tr(rho) - 1| = {:.3e}", (tr - ONE).norm()));
    }
    let herm = rho.hermiticity_error();
    if herm > HERMITICITY_TOL {
        return Some(format!("Hermiticity error {herm:.3e}"));
    }
    let top = rho.top_fock_population();
    if top > cfg.truncation_tol {
        return Some(format!("population {top:.3e} in the top Fock level"));
    }
    let min_eig = rho.min_eigenvalue();
    if min_eig < -POSITIVITY_TOL {
        return Some(format!("minimum eigenvalue {min_eig:.3e}"));
    }
    None
}

/// Moments read from a density matrix. For one emitter the pair entries
/// are not defined and are left at zero with `has_pairs = false`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractedMoments {
    pub state: MomentState,
    pub has_pairs: bool,
}

/// Moment operators for a chosen ordered pair of sites.
pub struct MomentOperators {
    ops: Vec<(Moment, SparseOp)>,
}

impl MomentOperators {
    pub fn new(basis: Basis, site1: usize, site2: Option<usize>) -> Self {
        let a = basis.destroy();
        let ad = a.adjoint();
        let s1 = basis.lower(site1);
        let z1 = basis.sigma_z(site1);
        let mut ops = vec![
            (Moment::A, a.clone()),
            (Moment::S, s1.clone()),
            (Moment::AA, a.mul(&a)),
            (Moment::AdA, ad.mul(&a)),
            (Moment::SdS, s1.adjoint().mul(&s1)),
            (Moment::AS, a.mul(&s1)),
            (Moment::AdS, ad.mul(&s1)),
            (Moment::AZ, a.mul(&z1)),
        ];
        if let Some(site2) = site2 {
            let s2 = basis.lower(site2);
            let z2 = basis.sigma_z(site2);
            ops.push((Moment::SS, s1.mul(&s2)));
            ops.push((Moment::SdS2, s1.adjoint().mul(&s2)));
            ops.push((Moment::ZZ, z1.mul(&z2)));
            ops.push((Moment::SZ, s1.mul(&z2)));
        }
        Self { ops }
    }

    pub fn expect(&self, rho: &DensityMatrix) -> MomentState {
        let mut s = MomentState::zero();
        for (m, op) in &self.ops {
            s.set(*m, op.expect(rho));
        }
        s
    }
}

/// Extracts moments for the ordered site pair (i, j).
pub fn extract_moments_for_sites(rho: &DensityMatrix, i: usize, j: usize) -> MomentState {
    MomentOperators::new(rho.basis, i, Some(j)).expect(rho)
}

/// Reusable, symmetrised moment extraction for one basis.
pub struct MomentExtractor {
    single: Vec<MomentOperators>,
    pairs: Vec<MomentOperators>,
}

impl MomentExtractor {
    pub fn new(basis: Basis) -> Self {
        let n = basis.n_spins;
        let single = (0..n).map(|k| MomentOperators::new(basis, k, None)).collect();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    pairs.push(MomentOperators::new(basis, i, Some(j)));
                }
            }
        }
        Self { single, pairs }
    }

    pub fn extract(&self, rho: &DensityMatrix) -> ExtractedMoments {
        let mut acc = [ZERO; MOMENT_COUNT];
        for ops in &self.single {
            for (i, v) in ops.expect(rho).as_array().iter().enumerate() {
                acc[i] += v / self.single.len() as f64;
            }
        }
        let has_pairs = !self.pairs.is_empty();
        if has_pairs {
            let mut pair_acc = [ZERO; MOMENT_COUNT];
            for ops in &self.pairs {
                for (i, v) in ops.expect(rho).as_array().iter().enumerate() {
                    pair_acc[i] += v / self.pairs.len() as f64;
                }
            }
            for m in Moment::ALL.into_iter().filter(|m| m.is_pair()) {
                acc[m.index()] = pair_acc[m.index()];
            }
        }
        ExtractedMoments { state: MomentState::from_array(acc), has_pairs }
    }
}

/// All twelve moments, averaged over sites and ordered site pairs.
pub fn extract_moments(rho: &DensityMatrix) -> ExtractedMoments {
    MomentExtractor::new(rho.basis).extract(rho)
}

/// Exact steady state of one emitter with no cavity coupling:
/// returns (⟨σ⟩, ⟨σ†σ⟩) from the 4×4 Liouvillian.
pub fn single_spin_steady_state(params: &SystemParams) -> (Complex64, f64) {
    let p = SystemParams { g1: 0.0, n_emitters: 1, ..*params };
    let basis = Basis { n_max: 0, n_spins: 1 };
    let gen = generator_on(&p, basis);
    let rho = gen.steady_state().expect("single-spin Liouvillian has a unique steady state");
    let s = basis.lower(0);
    let sds = s.adjoint().mul(&s);
    (s.expect(&rho), sds.expect(&rho).re)
}

/// Tolerances used to judge agreement between the two engines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonTolerances {
    pub relative: f64,
    /// Absolute tolerance applied where the oracle magnitude is below
    /// `small_value`.
    pub absolute: f64,
    pub small_value: f64,
}

impl Default for ComparisonTolerances {
    fn default() -> Self {
        Self { relative: 0.05, absolute: 1e-6, small_value: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentDeviation {
    pub moment: Moment,
    pub max_abs: f64,
    /// Largest relative deviation over samples where |oracle| ≥ small_value.
    pub max_rel: f64,
    /// Largest absolute deviation over samples where |oracle| < small_value.
    pub max_abs_small: f64,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableDeviation {
    pub name: &'static str,
    pub max_abs: f64,
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub n_spins: usize,
    pub moments: Vec<MomentDeviation>,
    pub observables: Vec<ObservableDeviation>,
    pub times: Vec<f64>,
    pub oracle: Vec<MomentState>,
    pub cumulant: Vec<MomentState>,
}

impl ComparisonReport {
    pub fn all_within(&self) -> bool {
        self.moments.iter().all(|m| m.within)
    }

    pub fn worst_relative(&self) -> f64 {
        self.moments.iter().map(|m| m.max_rel).fold(0.0, f64::max)
    }
}

/// Runs both engines from the thermal state and tabulates deviations.
/// N is taken from `cfg.n_spins`.
pub fn compare_with_cumulant(
    params: &SystemParams,
    cfg: &OracleConfig,
    tol: &ComparisonTolerances,
) -> Result<ComparisonReport, OracleError> {
    let p = SystemParams { n_emitters: cfg.n_spins as u64, ..*params };
    let generator = build_generator(&p, cfg)?;
    let rho0 = DensityMatrix::thermal(generator.basis, p.n_bar);
    let oracle_trace = evolve(&rho0, &generator, cfg)?;
    let extractor = MomentExtractor::new(generator.basis);
    let oracle: Vec<MomentState> =
        oracle_trace.states.iter().map(|r| extractor.extract(r).state).collect();

    let icfg = IntegrationConfig {
        t_end: cfg.t_end,
        sample_count: cfg.sample_count,
        rel_tol: cfg.rel_tol,
        abs_tol: cfg.abs_tol,
        ..Default::default()
    };
    let init = initial_thermal_state(&p);
    let cumulant = crate::integrator::integrate_model(&MomentModel::new(p), &init, &icfg)?.states;

    let has_pairs = cfg.n_spins >= 2;
    let mut moments = Vec::new();
    for m in Moment::ALL {
        if m.is_pair() && !has_pairs {
            continue;
        }
        let mut dev = MomentDeviation {
            moment: m,
            max_abs: 0.0,
            max_rel: 0.0,
            max_abs_small: 0.0,
            within: true,
        };
        for (o, c) in oracle.iter().zip(&cumulant) {
            let (ov, cv) = (o.get(m), c.get(m));
            let diff = (cv - ov).norm();
            dev.max_abs = dev.max_abs.max(diff);
            if ov.norm() < tol.small_value {
                dev.max_abs_small = dev.max_abs_small.max(diff);
            } else {
                dev.max_rel = dev.max_rel.max(diff / ov.norm());
            }
        }
        dev.within = dev.max_rel <= tol.relative && dev.max_abs_small <= tol.absolute;
        moments.push(dev);
    }

    let mut obs = vec![
        ObservableDeviation { name: "cavity_var_min", max_abs: 0.0 },
        ObservableDeviation { name: "ensemble_var_min", max_abs: 0.0 },
    ];
    if has_pairs {
        obs.push(ObservableDeviation { name: "spin_var_z", max_abs: 0.0 });
    }
    for (o, c) in oracle.iter().zip(&cumulant) {
        let d0 = (min_cavity_quadrature(o).var_min - min_cavity_quadrature(c).var_min).abs();
        let d1 = (min_ensemble_quadrature(o, &p).var_min - min_ensemble_quadrature(c, &p).var_min).abs();
        obs[0].max_abs = obs[0].max_abs.max(d0);
        obs[1].max_abs = obs[1].max_abs.max(d1);
        if has_pairs {
            let d2 = (spin_metrics(o, &p).j_var[2] - spin_metrics(c, &p).j_var[2]).abs();
            obs[2].max_abs = obs[2].max_abs.max(d2);
        }
    }

    Ok(ComparisonReport {
        n_spins: cfg.n_spins,
        moments,
        observables: obs,
        times: oracle_trace.times,
        oracle,
        cumulant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(n_max: usize, n_spins: usize) -> Basis {
        Basis { n_max, n_spins }
    }

    #[test]
    fn dimension_cap_enforced() {
        let cfg = OracleConfig { n_max: 1000, n_spins: 3, ..Default::default() };
        assert!(matches!(
            build_generator(&SystemParams::default(), &cfg),
            Err(OracleError::DimensionCap { .. })
        ));
    }

    #[test]
    fn ladder_operators() {
        let b = basis(3, 2);
        let a = b.destroy();
        let comm = {
            let mut c = a.mul(&a.adjoint());
            c.add_scaled(&a.adjoint().mul(&a), -ONE);
            c
        };
        // [a, a†] = 1 except on the truncated top level
        for n in 0..3 {
            for s in 0..4 {
                let i = b.index(n, s);
                assert!((comm.get(i, i) - ONE).norm() < 1e-14);
            }
        }
        let s = b.lower(0);
        let sd = s.adjoint();
        let z = b.sigma_z(0);
        let mut c = sd.mul(&s);
        c.add_scaled(&s.mul(&sd), -ONE);
        assert_eq!(c.to_dense(), z.to_dense());
    }

    #[test]
    fn extraction_examples() {
        let b = basis(2, 2);
        let d = b.dim();
        let mut psi = vec![ZERO; d];
        psi[b.index(0, 0)] = ONE;
        let m = extract_moments(&DensityMatrix::pure(b, &psi)).state;
        assert!(m.sds.norm() < 1e-15 && m.ada.norm() < 1e-15 && m.a.norm() < 1e-15);

        let mut psi = vec![ZERO; d];
        psi[b.index(1, 0)] = ONE;
        let m = extract_moments(&DensityMatrix::pure(b, &psi)).state;
        assert!((m.ada - ONE).norm() < 1e-15);
        assert!(m.a.norm() < 1e-15 && m.sds.norm() < 1e-15);

        // (|eg⟩ + |ge⟩)/√2 ⊗ |0⟩
        let mut psi = vec![ZERO; d];
        psi[b.index(0, 0b10)] = ONE;
        psi[b.index(0, 0b01)] = ONE;
        let m = extract_moments(&DensityMatrix::pure(b, &psi)).state;
        assert!((m.sds.re - 0.5).abs() < 1e-15);
        assert!((m.sds2.re - 0.5).abs() < 1e-15);
        assert!((m.zz.re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_emitter_has_no_pairs() {
        let rho = DensityMatrix::thermal(basis(2, 1), 0.0);
        assert!(!extract_moments(&rho).has_pairs);
    }
}
