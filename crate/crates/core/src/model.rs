//! Right-hand side of the closed cumulant equations of motion.
//!
//! Same-site products are reduced exactly before any closure; only genuinely
//! tri-partite moments (field ⊗ site 1 ⊗ site 2, or field² ⊗ site 1) are
//! factorised with [`cumulant_close`].

use num_complex::Complex64;

use crate::error::ModelError;
use crate::moments::{cumulant_close, MomentState, PACKED_LEN};
use crate::params::SystemParams;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which variant of the ⟨σ₁σ₂z⟩ and ⟨aσ₁z⟩ equations to use.
///
/// The two forms differ only in those two equations:
///
/// * `MasterEquation` follows from the Lindblad generator: ⟨σ₁σ₂z⟩ is damped
///   at Γ_t + 2n̄γ₁ with the population term ⟨σ₁σ₂†σ₂⟩, and the ensemble
///   term of ⟨aσ₁z⟩ reads (N−1)(⟨σ₁σ₂z⟩ − ⟨σ₁†σ₂z⟩).
/// * `Printed` damps ⟨σ₁σ₂z⟩ at 2Γ + 2n̄γ₁ with the term ⟨σ₁σ₂σ₂†⟩, and uses
///   (N−1)(⟨σ₁σ₂z⟩ − ⟨σ₁†σ₂⟩) in ⟨aσ₁z⟩. Kept for comparison only; it
///   leaves ⟨σ₁σ₂z⟩ undamped when γ₂* = n̄ = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EquationForm {
    #[default]
    MasterEquation,
    Printed,
}

/// The moment equations for one parameter set.
#[derive(Debug, Clone, Copy)]
pub struct MomentModel {
    pub params: SystemParams,
    pub form: EquationForm,
}

/// Every closed third-order moment the equations need.
struct Triples {
    a_s_z2: Complex64,
    ad_s_z2: Complex64,
    aa_z: Complex64,
    ada_z: Complex64,
    a_zz: Complex64,
    a_s_s: Complex64,
    ad_s_s: Complex64,
    a_s_sd2: Complex64,
    ad_s_sd2: Complex64,
    aa_s: Complex64,
    aa_sd: Complex64,
    ada_s: Complex64,
}

impl Triples {
    fn close(x: &MomentState) -> Self {
        let (a, ad, s, sd, z) = (x.a, x.ad(), x.s, x.sd(), x.sigma_z());
        Self {
            // ⟨a σ₁ σ₂z⟩
            a_s_z2: cumulant_close(x.r#as, x.az, x.sz, a, s, z),
            // ⟨a† σ₁ σ₂z⟩
            ad_s_z2: cumulant_close(x.ads, x.ad_z(), x.sz, ad, s, z),
            // ⟨a² σ₁z⟩
            aa_z: cumulant_close(x.aa, x.az, x.az, a, a, z),
            // ⟨a†a σ₁z⟩
            ada_z: cumulant_close(x.ada, x.ad_z(), x.az, ad, a, z),
            // ⟨a σ₁z σ₂z⟩
            a_zz: cumulant_close(x.az, x.az, x.zz, a, z, z),
            // ⟨a σ₁ σ₂⟩
            a_s_s: cumulant_close(x.r#as, x.r#as, x.ss, a, s, s),
            // ⟨a† σ₁ σ₂⟩
            ad_s_s: cumulant_close(x.ads, x.ads, x.ss, ad, s, s),
            // ⟨a σ₁ σ₂†⟩
            a_s_sd2: cumulant_close(x.r#as, x.a_sd(), x.s_sd2(), a, s, sd),
            // ⟨a† σ₁ σ₂†⟩
            ad_s_sd2: cumulant_close(x.ads, x.ad_sd(), x.s_sd2(), ad, s, sd),
            // ⟨a² σ₁⟩
            aa_s: cumulant_close(x.aa, x.r#as, x.r#as, a, a, s),
            // ⟨a² σ₁†⟩
            aa_sd: cumulant_close(x.aa, x.a_sd(), x.a_sd(), a, a, sd),
            // ⟨a†a σ₁⟩
            ada_s: cumulant_close(x.ada, x.ads, x.r#as, ad, a, s),
        }
    }
}

impl MomentModel {
    pub fn new(params: SystemParams) -> Self {
        Self { params, form: EquationForm::default() }
    }

    pub fn with_form(params: SystemParams, form: EquationForm) -> Self {
        Self { params, form }
    }

    /// d/dt of every stored moment. No input checking.
    pub fn derivative(&self, x: &MomentState) -> MomentState {
        let p = &self.params;
        let g = p.g1;
        let n = p.n();
        let nm1 = n - 1.0;
        let kappa = p.kappa;
        let g1 = p.gamma1;
        let nbar = p.n_bar;
        let om = p.omega_rabi;
        let gamma = p.gamma_total();
        let gt = p.gamma_t();
        let gc = p.gamma_c();

        let z = x.sigma_z();
        let t = Triples::close(x);
        // conjugate partners follow from the accessor identities
        let a_sd_z2 = t.ad_s_z2.conj();
        let ad_sd_z2 = t.a_s_z2.conj();
        let adad_z = t.aa_z.conj();
        let ad_zz = t.a_zz.conj();
        let ada_sd = t.ada_s.conj();
        let four_z2 = t.ad_s_z2 + a_sd_z2 + t.a_s_z2 + ad_sd_z2;

        // same-site reductions, inlined; see `pauli_reduce_same_site`
        let s_sd = 1.0 - x.sds;
        let a_sd_s = 0.5 * (x.a + x.az);
        let sd_s_z2 = 0.5 * (z + x.zz);

        let d_a = -gc * x.a + g * n * (x.s - x.sd());
        let d_s = -gt * x.s + g * (x.az + x.ad_z()) + 0.5 * I * om * z;
        let d_aa = -2.0 * gc * x.aa + 2.0 * g * n * (x.r#as - x.a_sd());
        let d_ada = g * n * (x.ads + x.a_sd() - x.r#as - x.ad_sd()) - 2.0 * kappa * x.ada
            + 2.0 * kappa * nbar;
        let d_sds = -g * (x.ads + x.a_sd() + x.r#as + x.ad_sd()) - g1 * x.sds - nbar * g1 * z
            - 0.5 * I * om * (x.sd() - x.s);
        let d_ss = -2.0 * gt * x.ss + 2.0 * g * (t.a_s_z2 + t.ad_s_z2) + I * om * x.sz;
        let d_sds2 = -2.0 * gamma * x.sds2 + g * four_z2 - 0.5 * I * om * (x.sz - x.sd_z());
        let d_zz = -4.0 * g1 * (sd_s_z2 + nbar * x.zz) - 4.0 * g * four_z2
            - 2.0 * I * om * (x.sd_z() - x.sz);

        let sz_coupling = g
            * (t.a_zz + ad_zz - 2.0 * (t.ad_s_s + t.a_s_sd2 + t.a_s_s + t.ad_s_sd2));
        let sz_drive = -0.5 * I * om * (2.0 * (x.s_sd2() - x.ss) - x.zz);
        let d_sz = match self.form {
            EquationForm::MasterEquation => {
                // ⟨σ₁σ₂†σ₂⟩
                let pop = 0.5 * (x.s + x.sz);
                -gt * x.sz - 2.0 * g1 * (pop + nbar * x.sz) + sz_coupling + sz_drive
            }
            EquationForm::Printed => {
                // ⟨σ₁σ₂σ₂†⟩
                let pop = 0.5 * (x.s - x.sz);
                -2.0 * gamma * x.sz - 2.0 * g1 * (pop + nbar * x.sz) + sz_coupling + sz_drive
            }
        };

        let d_as = -(gt + gc) * x.r#as + g * (t.aa_z + t.ada_z - s_sd)
            + g * nm1 * (x.ss - x.s_sd2())
            + 0.5 * I * om * x.az;
        let d_ads = -(gt + gc.conj()) * x.ads + g * (x.sds + t.ada_z + adad_z)
            + g * nm1 * (x.s_sd2() - x.ss)
            + 0.5 * I * om * x.ad_z();
        let az_ensemble = match self.form {
            EquationForm::MasterEquation => x.sz - x.sd_z(),
            EquationForm::Printed => x.sz - x.sds2,
        };
        let d_az = -gc * x.az - 2.0 * g1 * (a_sd_s + nbar * x.az)
            - g * (2.0 * (t.aa_s + t.aa_sd + t.ada_s + ada_sd) + x.s + x.sd())
            + g * nm1 * az_ensemble
            - I * om * (x.a_sd() - x.r#as);

        MomentState {
            a: d_a,
            s: d_s,
            aa: d_aa,
            ada: d_ada,
            sds: d_sds,
            ss: d_ss,
            sds2: d_sds2,
            zz: d_zz,
            sz: d_sz,
            r#as: d_as,
            ads: d_ads,
            az: d_az,
        }
    }

    /// Packed-vector form of [`Self::derivative`], used by the integrators.
    pub fn derivative_packed(&self, y: &[f64], dy: &mut [f64]) {
        debug_assert_eq!(y.len(), PACKED_LEN);
        self.derivative(&MomentState::unpack(y)).pack(dy);
    }
}

/// Checked evaluation of the equations of motion.
pub fn rhs(params: &SystemParams, state: &MomentState) -> Result<MomentState, ModelError> {
    params.validate()?;
    if let Some(m) = state.first_non_finite() {
        return Err(ModelError::NonFiniteState { name: m.name() });
    }
    Ok(MomentModel::new(*params).derivative(state))
}

/// Max-norm of the packed derivative.
pub fn residual_norm(model: &MomentModel, state: &MomentState) -> f64 {
    model.derivative(state).max_norm()
}
