//! Physical parameters, unit conventions and thermal occupations.
//!
//! All frequencies and rates held by [`SystemParams`] and [`Detunings`] are
//! angular frequencies expressed in the internal unit `2π × 1 MHz`. A
//! frequency of ν Hz therefore has the internal value `ν / 10⁶`, and time
//! is measured in units of `1 / (2π × 1 MHz)`. Keeping the matrix entries
//! in the range 1–100 is what keeps the Lyapunov solves well conditioned.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Reduced Planck constant [J·s] (CODATA 2018, exact in SI-2019).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant [J/K] (exact in SI-2019).
pub const K_B: f64 = 1.380_649e-23;

/// Size of one internal angular-frequency unit in rad/s.
pub const RAD_PER_SECOND_PER_UNIT: f64 = TAU * 1.0e6;

/// Converts an ordinary frequency ν [Hz] to internal angular units.
pub fn hz_to_internal(nu_hz: f64) -> f64 {
    nu_hz / 1.0e6
}

/// Converts an internal angular frequency back to an ordinary frequency ν [Hz].
pub fn internal_to_hz(omega: f64) -> f64 {
    omega * 1.0e6
}

/// Converts an internal angular frequency to rad/s.
pub fn internal_to_rad_per_second(omega: f64) -> f64 {
    omega * RAD_PER_SECOND_PER_UNIT
}

/// Converts a time in seconds to internal time units.
pub fn seconds_to_internal(t: f64) -> f64 {
    t * RAD_PER_SECOND_PER_UNIT
}

/// Converts an internal time back to seconds.
pub fn internal_to_seconds(t: f64) -> f64 {
    t / RAD_PER_SECOND_PER_UNIT
}

/// Mode frequencies, amplitude decay rates and couplings (internal units).
///
/// `kappa_*` are amplitude decay rates: they enter the Langevin equations as
/// `-κ` with input coupling `√(2κ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub omega_a: f64,
    pub omega_m1: f64,
    pub omega_m2: f64,
    /// Carrier frequency of the squeezed-vacuum drive; defines the rotating frame.
    pub omega_s: f64,
    pub kappa_a: f64,
    pub kappa_m1: f64,
    pub kappa_m2: f64,
    pub g1: f64,
    pub g2: f64,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega_a", self.omega_a),
            ("omega_m1", self.omega_m1),
            ("omega_m2", self.omega_m2),
            ("omega_s", self.omega_s),
            ("kappa_a", self.kappa_a),
            ("kappa_m1", self.kappa_m1),
            ("kappa_m2", self.kappa_m2),
            ("g1", self.g1),
            ("g2", self.g2),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(invalid(name, format!("must be finite, got {value}")));
            }
        }
        for (name, value) in [
            ("kappa_a", self.kappa_a),
            ("kappa_m1", self.kappa_m1),
            ("kappa_m2", self.kappa_m2),
        ] {
            if value <= 0.0 {
                return Err(invalid(name, format!("decay rate must be > 0, got {value}")));
            }
        }
        for (name, value) in [
            ("g1", self.g1),
            ("g2", self.g2),
            ("omega_a", self.omega_a),
            ("omega_m1", self.omega_m1),
            ("omega_m2", self.omega_m2),
            ("omega_s", self.omega_s),
        ] {
            if value < 0.0 {
                return Err(invalid(name, format!("must be ≥ 0, got {value}")));
            }
        }
        Ok(())
    }

    /// Returns a copy with the two magnon modes' labels exchanged.
    pub fn swapped_magnons(&self) -> Self {
        Self {
            omega_m1: self.omega_m2,
            omega_m2: self.omega_m1,
            kappa_m1: self.kappa_m2,
            kappa_m2: self.kappa_m1,
            g1: self.g2,
            g2: self.g1,
            ..*self
        }
    }
}

fn invalid(name: &'static str, reason: String) -> Error {
    Error::InvalidParameter { name, reason }
}

/// Detunings of each mode from the drive carrier (internal units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detunings {
    pub delta_a: f64,
    pub delta_m1: f64,
    pub delta_m2: f64,
}

pub fn detunings_from(params: &SystemParams) -> Detunings {
    Detunings {
        delta_a: params.omega_a - params.omega_s,
        delta_m1: params.omega_m1 - params.omega_s,
        delta_m2: params.omega_m2 - params.omega_s,
    }
}

/// Squeezing parameter `r ≥ 0` and phase `θ ∈ [0, 2π)` of the input squeezed vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    r: f64,
    theta: f64,
}

impl DriveParams {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(invalid("r", format!("squeezing parameter must be ≥ 0, got {r}")));
        }
        if !theta.is_finite() {
            return Err(invalid("theta", format!("phase must be finite, got {theta}")));
        }
        Ok(Self {
            r,
            theta: reduce_angle(theta),
        })
    }

    /// Unsqueezed vacuum input.
    pub fn vacuum() -> Self {
        Self { r: 0.0, theta: 0.0 }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Mean photon number `𝒩 = sinh² r` of the input field.
    pub fn photon_number(&self) -> f64 {
        self.r.sinh().powi(2)
    }

    /// Anomalous correlation `ℳ = e^{iθ} sinh r cosh r` as `(Re ℳ, Im ℳ)`.
    pub fn anomalous_correlation(&self) -> (f64, f64) {
        let amplitude = self.r.sinh() * self.r.cosh();
        (amplitude * self.theta.cos(), amplitude * self.theta.sin())
    }
}

fn reduce_angle(theta: f64) -> f64 {
    let reduced = theta.rem_euclid(TAU);
    // rem_euclid rounds tiny negative inputs up to exactly TAU.
    if reduced >= TAU {
        0.0
    } else {
        reduced
    }
}

/// Bath temperature together with the derived thermal magnon occupations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    temperature: f64,
    n_m1: f64,
    n_m2: f64,
}

impl Environment {
    /// Evaluates the Bose–Einstein occupations of both magnon modes at `temperature` [K].
    pub fn new(params: &SystemParams, temperature: f64) -> Result<Self> {
        let n_m1 = thermal_occupation(internal_to_rad_per_second(params.omega_m1), temperature)?;
        let n_m2 = thermal_occupation(internal_to_rad_per_second(params.omega_m2), temperature)?;
        Ok(Self {
            temperature,
            n_m1,
            n_m2,
        })
    }

    /// Zero-temperature environment: both magnon baths in vacuum.
    pub fn zero_temperature() -> Self {
        Self {
            temperature: 0.0,
            n_m1: 0.0,
            n_m2: 0.0,
        }
    }

    /// Bypasses the Bose–Einstein formula; used where the occupations are the
    /// quantity of interest rather than the temperature.
    pub fn with_occupations(temperature: f64, n_m1: f64, n_m2: f64) -> Result<Self> {
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(invalid("temperature", format!("must be ≥ 0, got {temperature}")));
        }
        for (name, n) in [("n_m1", n_m1), ("n_m2", n_m2)] {
            if !(n.is_finite() && n >= 0.0) {
                return Err(invalid(name, format!("occupation must be ≥ 0, got {n}")));
            }
        }
        Ok(Self {
            temperature,
            n_m1,
            n_m2,
        })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn n_m1(&self) -> f64 {
        self.n_m1
    }

    pub fn n_m2(&self) -> f64 {
        self.n_m2
    }

    pub fn swapped_magnons(&self) -> Self {
        Self {
            n_m1: self.n_m2,
            n_m2: self.n_m1,
            ..*self
        }
    }
}

/// Bose–Einstein occupation `1 / (exp(ħω/k_BT) − 1)` for `omega` in rad/s and `temperature` in K.
///
/// Exactly zero at `T = 0`. Uses `exp_m1` so the high-temperature limit keeps
/// full precision, and saturates to zero instead of overflowing when
/// `ħω/k_BT` is large.
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::Domain(format!(
            "thermal occupation needs a positive angular frequency, got {omega} rad/s"
        )));
    }
    if !(temperature.is_finite() && temperature >= 0.0) {
        return Err(Error::Domain(format!(
            "temperature must be finite and ≥ 0, got {temperature} K"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega / (K_B * temperature);
    Ok(1.0 / x.exp_m1())
}

/// Parameter values of the reference configuration (resonant drive).
pub mod defaults {
    /// Cavity frequency ν_a [Hz].
    pub const OMEGA_A_HZ: f64 = 10.0e9;
    /// Cavity amplitude decay rate κ_a/2π [Hz].
    pub const KAPPA_A_HZ: f64 = 5.0e6;
    /// Magnon decay rate κ_m/2π = κ_a/(5·2π) [Hz].
    pub const KAPPA_M_HZ: f64 = KAPPA_A_HZ / 5.0;
    /// Coupling g/2π = 4κ_a/2π [Hz].
    pub const G_HZ: f64 = 4.0 * KAPPA_A_HZ;
    /// Bath temperature [K].
    pub const TEMPERATURE_K: f64 = 0.020;
}

/// Reference parameter set: ν_a = 10 GHz, κ_a/2π = 5 MHz, κ_m = κ_a/5,
/// g₁ = g₂ = 4κ_a, T = 20 mK, with magnons and drive resonant with the cavity.
pub fn paper_defaults() -> (SystemParams, Environment) {
    let omega_a = hz_to_internal(defaults::OMEGA_A_HZ);
    let kappa_a = hz_to_internal(defaults::KAPPA_A_HZ);
    let params = SystemParams {
        omega_a,
        omega_m1: omega_a,
        omega_m2: omega_a,
        omega_s: omega_a,
        kappa_a,
        kappa_m1: kappa_a / 5.0,
        kappa_m2: kappa_a / 5.0,
        g1: 4.0 * kappa_a,
        g2: 4.0 * kappa_a,
    };
    let env = Environment::new(&params, defaults::TEMPERATURE_K)
        .expect("reference magnon frequency is positive");
    (params, env)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEN_GHZ_RAD: f64 = TAU * 10.0e9;

    #[test]
    fn occupation_is_zero_at_zero_temperature() {
        assert_eq!(thermal_occupation(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(thermal_occupation(TEN_GHZ_RAD, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn occupation_at_ten_ghz_and_twenty_millikelvin() {
        // ħω/k_BT evaluated by hand: 0.47992... / 0.02 ≈ 23.996
        let x = HBAR * TEN_GHZ_RAD / (K_B * 0.02);
        assert!((x - 23.996).abs() < 1e-3, "x = {x}");
        let n = thermal_occupation(TEN_GHZ_RAD, 0.02).unwrap();
        assert!((n - 3.8e-11).abs() < 0.1e-11, "n = {n}");
        assert!((n - (-x).exp()).abs() < 1e-20);
    }

    #[test]
    fn occupation_matches_rayleigh_jeans_limit() {
        let omega = TAU * 1.0e6;
        let temperature = 10.0;
        let ratio = HBAR * omega / (K_B * temperature);
        assert!(ratio < 0.01);
        let n = thermal_occupation(omega, temperature).unwrap();
        let classical = 1.0 / ratio;
        assert!(((n - classical) / classical).abs() < 0.01);
    }

    #[test]
    fn occupation_saturates_without_nan() {
        let n = thermal_occupation(TEN_GHZ_RAD, 1e-6).unwrap();
        assert_eq!(n, 0.0);
        let n = thermal_occupation(1e-30, 1e6).unwrap();
        assert!(n.is_finite() && n > 1e40);
    }

    #[test]
    fn occupation_rejects_non_positive_frequency() {
        assert!(matches!(thermal_occupation(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(thermal_occupation(-1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(thermal_occupation(1.0, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn occupation_is_monotone() {
        let temps = [0.001, 0.01, 0.05, 0.1, 0.5, 1.0, 10.0];
        for pair in temps.windows(2) {
            let lo = thermal_occupation(TEN_GHZ_RAD, pair[0]).unwrap();
            let hi = thermal_occupation(TEN_GHZ_RAD, pair[1]).unwrap();
            assert!(hi > lo);
        }
        let freqs = [1e8, 1e9, 1e10, 5e10];
        for pair in freqs.windows(2) {
            let lo = thermal_occupation(pair[0], 0.1).unwrap();
            let hi = thermal_occupation(pair[1], 0.1).unwrap();
            assert!(lo > hi);
        }
    }

    #[test]
    fn detunings_are_exact_differences() {
        let (mut p, _) = paper_defaults();
        let d = detunings_from(&p);
        assert_eq!((d.delta_a, d.delta_m1, d.delta_m2), (0.0, 0.0, 0.0));

        p.omega_s = hz_to_internal(9.995e9);
        let d = detunings_from(&p);
        assert!((internal_to_hz(d.delta_a) - 5.0e6).abs() < 1e-3);
        assert_eq!(d.delta_a + p.omega_s, p.omega_a);
        assert_eq!(d.delta_m1 + p.omega_s, p.omega_m1);
    }

    #[test]
    fn reference_values() {
        let (p, env) = paper_defaults();
        p.validate().unwrap();
        assert!((internal_to_hz(p.kappa_m1) - 1.0e6).abs() < 1e-6);
        assert!((internal_to_hz(p.g1) - 20.0e6).abs() < 1e-6);
        assert_eq!(p.g1, p.g2);
        assert_eq!(p.omega_s, p.omega_a);
        assert_eq!(env.temperature(), 0.02);
        assert!((env.n_m1() - 3.8e-11).abs() < 0.1e-11);
        assert_eq!(env.n_m1(), env.n_m2());
    }

    #[test]
    fn validation_rejects_bad_params() {
        let (p, _) = paper_defaults();
        let bad = SystemParams { kappa_a: 0.0, ..p };
        assert!(bad.validate().is_err());
        let bad = SystemParams { g2: -1.0, ..p };
        assert!(bad.validate().is_err());
        let bad = SystemParams { omega_s: f64::NAN, ..p };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn theta_is_reduced() {
        let d = DriveParams::new(1.0, -1e-300).unwrap();
        assert!(d.theta() >= 0.0 && d.theta() < TAU);
        let d = DriveParams::new(1.0, 3.0 * TAU + 0.5).unwrap();
        assert!((d.theta() - 0.5).abs() < 1e-12);
        assert!(DriveParams::new(-0.1, 0.0).is_err());
    }
}
