//! Plain-text configuration (TOML key/value) and command-line overrides.
//!
//! Frequencies are given as ordinary frequencies ν = ω/2π in Hz, the
//! temperature in K and the squeezing phase in rad:
//!
//! ```toml
//! omega_a_hz = 10.0e9
//! kappa_a_hz = 5.0e6
//! g1_hz = 20.0e6
//! r = 2.0
//! theta_rad = 0.0
//! temperature_k = 0.02
//! ```
//!
//! Missing keys fall back to the reference configuration. The magnon and
//! drive frequencies default to the (possibly overridden) cavity frequency.

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{
    defaults, hz_to_internal, internal_to_hz, DriveParams, Environment, SystemParams,
};

/// Squeezing parameter used when the configuration does not set `r`.
pub const DEFAULT_R: f64 = 2.0;

/// Every key accepted by a configuration file or a `key=value` override.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConfigKey {
    OmegaAHz,
    OmegaM1Hz,
    OmegaM2Hz,
    OmegaSHz,
    KappaAHz,
    KappaM1Hz,
    KappaM2Hz,
    G1Hz,
    G2Hz,
    R,
    ThetaRad,
    TemperatureK,
}

impl ConfigKey {
    pub const ALL: [ConfigKey; 12] = [
        ConfigKey::OmegaAHz,
        ConfigKey::OmegaM1Hz,
        ConfigKey::OmegaM2Hz,
        ConfigKey::OmegaSHz,
        ConfigKey::KappaAHz,
        ConfigKey::KappaM1Hz,
        ConfigKey::KappaM2Hz,
        ConfigKey::G1Hz,
        ConfigKey::G2Hz,
        ConfigKey::R,
        ConfigKey::ThetaRad,
        ConfigKey::TemperatureK,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConfigKey::OmegaAHz => "omega_a_hz",
            ConfigKey::OmegaM1Hz => "omega_m1_hz",
            ConfigKey::OmegaM2Hz => "omega_m2_hz",
            ConfigKey::OmegaSHz => "omega_s_hz",
            ConfigKey::KappaAHz => "kappa_a_hz",
            ConfigKey::KappaM1Hz => "kappa_m1_hz",
            ConfigKey::KappaM2Hz => "kappa_m2_hz",
            ConfigKey::G1Hz => "g1_hz",
            ConfigKey::G2Hz => "g2_hz",
            ConfigKey::R => "r",
            ConfigKey::ThetaRad => "theta_rad",
            ConfigKey::TemperatureK => "temperature_k",
        }
    }
}

impl fmt::Display for ConfigKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConfigKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConfigKey::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = ConfigKey::ALL.iter().map(|k| k.name()).collect();
                Error::Config(format!("unknown key `{s}` (expected one of: {})", known.join(", ")))
            })
    }
}

/// A partial configuration; unset keys fall back to lower-precedence sources.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub omega_a_hz: Option<f64>,
    pub omega_m1_hz: Option<f64>,
    pub omega_m2_hz: Option<f64>,
    pub omega_s_hz: Option<f64>,
    pub kappa_a_hz: Option<f64>,
    pub kappa_m1_hz: Option<f64>,
    pub kappa_m2_hz: Option<f64>,
    pub g1_hz: Option<f64>,
    pub g2_hz: Option<f64>,
    pub r: Option<f64>,
    pub theta_rad: Option<f64>,
    pub temperature_k: Option<f64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for key in ConfigKey::ALL {
            if let Some(v) = cfg.get(key) {
                if !v.is_finite() {
                    return Err(Error::Config(format!("`{key}` must be finite, got {v}")));
                }
            }
        }
        Ok(cfg)
    }

    fn slot(&mut self, key: ConfigKey) -> &mut Option<f64> {
        match key {
            ConfigKey::OmegaAHz => &mut self.omega_a_hz,
            ConfigKey::OmegaM1Hz => &mut self.omega_m1_hz,
            ConfigKey::OmegaM2Hz => &mut self.omega_m2_hz,
            ConfigKey::OmegaSHz => &mut self.omega_s_hz,
            ConfigKey::KappaAHz => &mut self.kappa_a_hz,
            ConfigKey::KappaM1Hz => &mut self.kappa_m1_hz,
            ConfigKey::KappaM2Hz => &mut self.kappa_m2_hz,
            ConfigKey::G1Hz => &mut self.g1_hz,
            ConfigKey::G2Hz => &mut self.g2_hz,
            ConfigKey::R => &mut self.r,
            ConfigKey::ThetaRad => &mut self.theta_rad,
            ConfigKey::TemperatureK => &mut self.temperature_k,
        }
    }

    pub fn get(&self, key: ConfigKey) -> Option<f64> {
        self.clone().slot(key).take()
    }

    pub fn set(&mut self, key: ConfigKey, value: f64) {
        *self.slot(key) = Some(value);
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, text: &str) -> Result<()> {
        let (key, value) = parse_override(text)?;
        self.set(key, value);
        Ok(())
    }

    /// Keys set in `higher` replace the ones in `self`.
    pub fn merged_with(&self, higher: &ConfigFile) -> ConfigFile {
        let mut out = self.clone();
        for key in ConfigKey::ALL {
            if let Some(v) = higher.get(key) {
                out.set(key, v);
            }
        }
        out
    }

    /// Every key set from an existing operating point.
    pub fn from_point(point: &PointConfig) -> Self {
        let p = &point.params;
        Self {
            omega_a_hz: Some(internal_to_hz(p.omega_a)),
            omega_m1_hz: Some(internal_to_hz(p.omega_m1)),
            omega_m2_hz: Some(internal_to_hz(p.omega_m2)),
            omega_s_hz: Some(internal_to_hz(p.omega_s)),
            kappa_a_hz: Some(internal_to_hz(p.kappa_a)),
            kappa_m1_hz: Some(internal_to_hz(p.kappa_m1)),
            kappa_m2_hz: Some(internal_to_hz(p.kappa_m2)),
            g1_hz: Some(internal_to_hz(p.g1)),
            g2_hz: Some(internal_to_hz(p.g2)),
            r: Some(point.drive.r()),
            theta_rad: Some(point.drive.theta()),
            temperature_k: Some(point.temperature),
        }
    }

    /// Fills unset keys from the reference configuration and converts to
    /// internal units.
    pub fn resolve(&self) -> Result<PointConfig> {
        let omega_a_hz = self.omega_a_hz.unwrap_or(defaults::OMEGA_A_HZ);
        let params = SystemParams {
            omega_a: hz_to_internal(omega_a_hz),
            omega_m1: hz_to_internal(self.omega_m1_hz.unwrap_or(omega_a_hz)),
            omega_m2: hz_to_internal(self.omega_m2_hz.unwrap_or(omega_a_hz)),
            omega_s: hz_to_internal(self.omega_s_hz.unwrap_or(omega_a_hz)),
            kappa_a: hz_to_internal(self.kappa_a_hz.unwrap_or(defaults::KAPPA_A_HZ)),
            kappa_m1: hz_to_internal(self.kappa_m1_hz.unwrap_or(defaults::KAPPA_M_HZ)),
            kappa_m2: hz_to_internal(self.kappa_m2_hz.unwrap_or(defaults::KAPPA_M_HZ)),
            g1: hz_to_internal(self.g1_hz.unwrap_or(defaults::G_HZ)),
            g2: hz_to_internal(self.g2_hz.unwrap_or(defaults::G_HZ)),
        };
        let drive = DriveParams::new(self.r.unwrap_or(DEFAULT_R), self.theta_rad.unwrap_or(0.0))?;
        PointConfig::new(
            params,
            drive,
            self.temperature_k.unwrap_or(defaults::TEMPERATURE_K),
        )
    }
}

/// Parses `key=value` where `key` is a [`ConfigKey`] name.
pub fn parse_override(text: &str) -> Result<(ConfigKey, f64)> {
    let (key, value) = text
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("expected key=value, got `{text}`")))?;
    let key: ConfigKey = key.trim().parse()?;
    let value = parse_number(value.trim())?;
    Ok((key, value))
}

pub(crate) fn parse_number(text: &str) -> Result<f64> {
    let v: f64 = text
        .parse()
        .map_err(|_| Error::Config(format!("`{text}` is not a number")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("`{text}` is not a finite number")))
    }
}

/// Fully specified operating point: system, drive and bath temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointConfig {
    pub params: SystemParams,
    pub drive: DriveParams,
    pub temperature: f64,
}

impl PointConfig {
    pub fn new(params: SystemParams, drive: DriveParams, temperature: f64) -> Result<Self> {
        params.validate()?;
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "temperature",
                reason: format!("must be ≥ 0 K, got {temperature}"),
            });
        }
        Ok(Self {
            params,
            drive,
            temperature,
        })
    }

    pub fn environment(&self) -> Result<Environment> {
        Environment::new(&self.params, self.temperature)
    }
}

impl Default for PointConfig {
    /// Reference configuration with `r = 2`, `θ = 0`.
    fn default() -> Self {
        ConfigFile::default()
            .resolve()
            .expect("reference configuration is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::paper_defaults;

    #[test]
    fn empty_config_is_reference() {
        let point = ConfigFile::parse("").unwrap().resolve().unwrap();
        let (p, env) = paper_defaults();
        assert_eq!(point.params, p);
        assert_eq!(point.temperature, env.temperature());
        assert_eq!(point.drive.r(), 2.0);
        assert_eq!(point.drive.theta(), 0.0);
        assert_eq!(point, PointConfig::default());
    }

    #[test]
    fn parses_all_keys() {
        let text = r#"
            omega_a_hz = 9.0e9
            omega_m1_hz = 9.001e9
            omega_m2_hz = 9.002e9
            omega_s_hz = 8.999e9
            kappa_a_hz = 4e6
            kappa_m1_hz = 1e6
            kappa_m2_hz = 2e6
            g1_hz = 10e6
            g2_hz = 5e6
            r = 1
            theta_rad = 0.5
            temperature_k = 0.1
        "#;
        let cfg = ConfigFile::parse(text).unwrap();
        for key in ConfigKey::ALL {
            assert!(cfg.get(key).is_some(), "{key}");
        }
        let point = cfg.resolve().unwrap();
        assert_eq!(point.params.omega_m2, 9002.0);
        assert_eq!(point.params.g2, 5.0);
        assert_eq!(point.drive.r(), 1.0);
        assert_eq!(point.temperature, 0.1);
    }

    #[test]
    fn frequencies_follow_cavity_by_default() {
        let cfg = ConfigFile::parse("omega_a_hz = 8e9").unwrap();
        let point = cfg.resolve().unwrap();
        assert_eq!(point.params.omega_m1, 8000.0);
        assert_eq!(point.params.omega_s, 8000.0);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(ConfigFile::parse("omega_b_hz = 1").is_err());
        assert!(ConfigFile::parse("r = \"two\"").is_err());
        assert!(ConfigFile::parse("r = nan").is_err());
        assert!(ConfigFile::parse("r = [").is_err());
        assert!(ConfigFile::parse("kappa_a_hz = -1").unwrap().resolve().is_err());
        assert!(ConfigFile::parse("temperature_k = -1").unwrap().resolve().is_err());
        assert!(ConfigFile::parse("r = -1").unwrap().resolve().is_err());
    }

    #[test]
    fn overrides() {
        assert_eq!(parse_override("r=1.5").unwrap(), (ConfigKey::R, 1.5));
        assert_eq!(
            parse_override(" temperature_k = 0.3 ").unwrap(),
            (ConfigKey::TemperatureK, 0.3)
        );
        assert!(parse_override("r").is_err());
        assert!(parse_override("x=1").is_err());
        assert!(parse_override("r=abc").is_err());
        assert!(parse_override("r=inf").is_err());
    }

    #[test]
    fn point_round_trips_through_config() {
        let mut point = PointConfig::default();
        point.params.g2 = 0.0;
        point.temperature = 0.3;
        let back = ConfigFile::from_point(&point).resolve().unwrap();
        assert_eq!(back.params.g2, 0.0);
        assert_eq!(back.temperature, 0.3);
        assert!((back.params.omega_a - point.params.omega_a).abs() < 1e-9);
    }

    #[test]
    fn precedence_cli_over_file_over_defaults() {
        let file = ConfigFile::parse("r = 1.0\ng2_hz = 1e6").unwrap();
        let mut cli = ConfigFile::default();
        cli.apply_override("r=0.5").unwrap();
        let point = file.merged_with(&cli).resolve().unwrap();
        assert_eq!(point.drive.r(), 0.5);
        assert_eq!(point.params.g2, 1.0);
        assert_eq!(point.params.g1, 20.0);
    }
}
