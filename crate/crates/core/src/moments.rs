//! The closed set of first and second moments tracked by the cumulant model.
//!
//! Site 1 and site 2 label two distinct (but otherwise arbitrary) emitters of
//! the symmetric ensemble. Conjugate moments are never stored; they are
//! obtained through the accessors on [`MomentState`].

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::params::SystemParams;

/// Number of complex moments in the state.
pub const MOMENT_COUNT: usize = 12;
/// Number of reals in the packed state vector.
pub const PACKED_LEN: usize = 2 * MOMENT_COUNT;

/// Canonical names, in storage order.
pub const MOMENT_NAMES: [&str; MOMENT_COUNT] = [
    "a", "s", "aa", "ada", "sds", "ss", "sds2", "zz", "sz", "as", "ads", "az",
];

/// Index of a stored moment in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Moment {
    /// ⟨a⟩
    A,
    /// ⟨σ₁⟩
    S,
    /// ⟨a²⟩
    AA,
    /// ⟨a†a⟩
    AdA,
    /// ⟨σ₁†σ₁⟩
    SdS,
    /// ⟨σ₁σ₂⟩
    SS,
    /// ⟨σ₁†σ₂⟩
    SdS2,
    /// ⟨σ₁zσ₂z⟩
    ZZ,
    /// ⟨σ₁σ₂z⟩
    SZ,
    /// ⟨aσ₁⟩
    AS,
    /// ⟨a†σ₁⟩
    AdS,
    /// ⟨aσ₁z⟩
    AZ,
}

impl Moment {
    pub const ALL: [Moment; MOMENT_COUNT] = [
        Moment::A,
        Moment::S,
        Moment::AA,
        Moment::AdA,
        Moment::SdS,
        Moment::SS,
        Moment::SdS2,
        Moment::ZZ,
        Moment::SZ,
        Moment::AS,
        Moment::AdS,
        Moment::AZ,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        MOMENT_NAMES[self.index()]
    }

    /// Moments that are expectation values of Hermitian operators.
    pub fn is_real(self) -> bool {
        matches!(self, Moment::AdA | Moment::SdS | Moment::SdS2 | Moment::ZZ)
    }

    /// Moments involving two distinct emitters; meaningless for N = 1.
    pub fn is_pair(self) -> bool {
        matches!(self, Moment::SS | Moment::SdS2 | Moment::ZZ | Moment::SZ)
    }
}

/// The twelve complex moments forming the ODE state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MomentState {
    pub a: Complex64,
    pub s: Complex64,
    pub aa: Complex64,
    pub ada: Complex64,
    pub sds: Complex64,
    pub ss: Complex64,
    pub sds2: Complex64,
    pub zz: Complex64,
    pub sz: Complex64,
    pub r#as: Complex64,
    pub ads: Complex64,
    pub az: Complex64,
}

impl MomentState {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn get(&self, m: Moment) -> Complex64 {
        self.as_array()[m.index()]
    }

    pub fn set(&mut self, m: Moment, value: Complex64) {
        let mut arr = self.as_array();
        arr[m.index()] = value;
        *self = Self::from_array(arr);
    }

    pub fn as_array(&self) -> [Complex64; MOMENT_COUNT] {
        [
            self.a, self.s, self.aa, self.ada, self.sds, self.ss, self.sds2, self.zz, self.sz,
            self.r#as, self.ads, self.az,
        ]
    }

    pub fn from_array(v: [Complex64; MOMENT_COUNT]) -> Self {
        Self {
            a: v[0],
            s: v[1],
            aa: v[2],
            ada: v[3],
            sds: v[4],
            ss: v[5],
            sds2: v[6],
            zz: v[7],
            sz: v[8],
            r#as: v[9],
            ads: v[10],
            az: v[11],
        }
    }

    /// Packs as `[re₀, im₀, re₁, im₁, …]` in canonical order.
    pub fn pack(&self, out: &mut [f64]) {
        for (i, c) in self.as_array().iter().enumerate() {
            out[2 * i] = c.re;
            out[2 * i + 1] = c.im;
        }
    }

    pub fn to_packed(&self) -> [f64; PACKED_LEN] {
        let mut out = [0.0; PACKED_LEN];
        self.pack(&mut out);
        out
    }

    pub fn unpack(v: &[f64]) -> Self {
        let mut arr = [Complex64::new(0.0, 0.0); MOMENT_COUNT];
        for (i, c) in arr.iter_mut().enumerate() {
            *c = Complex64::new(v[2 * i], v[2 * i + 1]);
        }
        Self::from_array(arr)
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// First moment that is not finite, if any.
    pub fn first_non_finite(&self) -> Option<Moment> {
        Moment::ALL
            .into_iter()
            .find(|m| !(self.get(*m).re.is_finite() && self.get(*m).im.is_finite()))
    }

    pub fn conj(&self) -> Self {
        Self::from_array(self.as_array().map(|c| c.conj()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_norm(&self) -> f64 {
        self.to_packed().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    // Derived and conjugate accessors.

    /// ⟨σ₁z⟩ = 2⟨σ₁†σ₁⟩ − 1.
    pub fn sigma_z(&self) -> Complex64 {
        2.0 * self.sds - 1.0
    }

    /// ⟨a†⟩
    pub fn ad(&self) -> Complex64 {
        self.a.conj()
    }

    /// ⟨σ₁†⟩
    pub fn sd(&self) -> Complex64 {
        self.s.conj()
    }

    /// ⟨(a†)²⟩
    pub fn adad(&self) -> Complex64 {
        self.aa.conj()
    }

    /// ⟨a†σ₁†⟩
    pub fn ad_sd(&self) -> Complex64 {
        self.r#as.conj()
    }

    /// ⟨aσ₁†⟩
    pub fn a_sd(&self) -> Complex64 {
        self.ads.conj()
    }

    /// ⟨a†σ₁z⟩
    pub fn ad_z(&self) -> Complex64 {
        self.az.conj()
    }

    /// ⟨σ₁†σ₂z⟩
    pub fn sd_z(&self) -> Complex64 {
        self.sz.conj()
    }

    /// ⟨σ₁σ₂†⟩
    pub fn s_sd2(&self) -> Complex64 {
        self.sds2.conj()
    }

    /// ⟨σ₁†σ₂†⟩
    pub fn sd_sd(&self) -> Complex64 {
        self.ss.conj()
    }
}

impl fmt::Display for MomentState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in Moment::ALL.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let c = self.get(*m);
            write!(f, "{}={:.6e}{:+.6e}i", m.name(), c.re, c.im)?;
        }
        Ok(())
    }
}

/// Thermal starting point: ⟨σz⟩ = 0, ⟨a⟩ = 0, ⟨a†a⟩ = n̄, every other moment zero.
pub fn initial_thermal_state(params: &SystemParams) -> MomentState {
    MomentState {
        sds: Complex64::new(0.5, 0.0),
        ada: Complex64::new(params.n_bar, 0.0),
        ..MomentState::zero()
    }
}

/// Third-order cumulant closure
/// ⟨abc⟩ ≈ ⟨ab⟩⟨c⟩ + ⟨ac⟩⟨b⟩ + ⟨bc⟩⟨a⟩ − 2⟨a⟩⟨b⟩⟨c⟩.
#[inline]
pub fn cumulant_close(
    pair_ab: Complex64,
    pair_ac: Complex64,
    pair_bc: Complex64,
    mean_a: Complex64,
    mean_b: Complex64,
    mean_c: Complex64,
) -> Complex64 {
    pair_ab * mean_c + pair_ac * mean_b + pair_bc * mean_a - 2.0 * mean_a * mean_b * mean_c
}

/// Third-order moments with a repeated spin site, which reduce exactly
/// through the spin-½ algebra and never go through the closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SameSiteMoment {
    /// ⟨σ₁σ₁†⟩
    SSd,
    /// ⟨aσ₁†σ₁⟩
    ASdS,
    /// ⟨σ₁σ₂σ₂†⟩
    SS2S2d,
    /// ⟨σ₁σ₂†σ₂⟩
    SS2dS2,
    /// ⟨σ₁†σ₁σ₂z⟩
    SdSZ2,
    /// ⟨σ₁zσ₁⟩
    ZS,
    /// ⟨σ₁σ₁z⟩
    SZ1,
    /// ⟨σ₁σ₁⟩
    SSsame,
}

impl FromStr for SameSiteMoment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "s1 s1d" => Self::SSd,
            "a s1d s1" => Self::ASdS,
            "s1 s2 s2d" => Self::SS2S2d,
            "s1 s2d s2" => Self::SS2dS2,
            "s1d s1 z2" => Self::SdSZ2,
            "z1 s1" => Self::ZS,
            "s1 z1" => Self::SZ1,
            "s1 s1" => Self::SSsame,
            other => return Err(format!("unknown same-site moment `{other}`")),
        })
    }
}

/// `constant + Σ coefficient·moment` over stored moments.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCombination {
    pub constant: Complex64,
    pub terms: Vec<(Moment, Complex64)>,
}

impl LinearCombination {
    pub fn eval(&self, state: &MomentState) -> Complex64 {
        self.terms
            .iter()
            .fold(self.constant, |acc, (m, c)| acc + c * state.get(*m))
    }
}

/// Exact reduction of a same-site product using σσ† = (1 − σz)/2,
/// σ†σ = (1 + σz)/2, σσ = 0, σzσ = −σ and σσz = σ, with σz = 2σ†σ − 1.
pub fn pauli_reduce_same_site(id: SameSiteMoment) -> LinearCombination {
    let c = |x: f64| Complex64::new(x, 0.0);
    let (constant, terms) = match id {
        SameSiteMoment::SSd => (c(1.0), vec![(Moment::SdS, c(-1.0))]),
        SameSiteMoment::ASdS => (c(0.0), vec![(Moment::A, c(0.5)), (Moment::AZ, c(0.5))]),
        SameSiteMoment::SS2S2d => (c(0.0), vec![(Moment::S, c(0.5)), (Moment::SZ, c(-0.5))]),
        SameSiteMoment::SS2dS2 => (c(0.0), vec![(Moment::S, c(0.5)), (Moment::SZ, c(0.5))]),
        SameSiteMoment::SdSZ2 => (c(-0.5), vec![(Moment::SdS, c(1.0)), (Moment::ZZ, c(0.5))]),
        SameSiteMoment::ZS => (c(0.0), vec![(Moment::S, c(-1.0))]),
        SameSiteMoment::SZ1 => (c(0.0), vec![(Moment::S, c(1.0))]),
        SameSiteMoment::SSsame => (c(0.0), vec![]),
    };
    LinearCombination { constant, terms }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn thermal_state_contents() {
        let p = SystemParams { n_bar: 0.0, ..Default::default() };
        let s = initial_thermal_state(&p);
        for m in Moment::ALL {
            let want = if m == Moment::SdS { 0.5 } else { 0.0 };
            assert_eq!(s.get(m), c(want), "{}", m.name());
        }
        assert_eq!(s.sigma_z(), c(0.0));

        let p = SystemParams { n_bar: 2.0, ..Default::default() };
        let s = initial_thermal_state(&p);
        assert_eq!(s.ada, c(2.0));
        assert_eq!(s.sds, c(0.5));
        assert_eq!(s.a, c(0.0));
    }

    #[test]
    fn closure_examples() {
        let z = c(0.0);
        assert_eq!(cumulant_close(c(3.0), c(-1.0), c(7.0), z, z, z), z);
        // factorised inputs reproduce the product of means
        let (a, b, cc) = (c(2.0), c(3.0), c(5.0));
        assert_eq!(cumulant_close(a * b, a * cc, b * cc, a, b, cc), c(30.0));
        assert_eq!(cumulant_close(c(2.0), c(3.0), c(4.0), c(1.0), c(1.0), c(1.0)), c(7.0));
    }

    #[test]
    fn pack_round_trip_and_order() {
        let mut s = MomentState::zero();
        for (i, m) in Moment::ALL.iter().enumerate() {
            s.set(*m, Complex64::new(i as f64, -(i as f64) - 0.5));
        }
        let packed = s.to_packed();
        assert_eq!(packed[2 * 9], 9.0);
        assert_eq!(packed[2 * 9 + 1], -9.5);
        assert_eq!(MomentState::unpack(&packed), s);
        assert_eq!(Moment::AS.name(), "as");
    }

    #[test]
    fn unknown_same_site_id_is_rejected() {
        assert!("s1 s1d".parse::<SameSiteMoment>().is_ok());
        assert!("a a s1".parse::<SameSiteMoment>().is_err());
    }
}
