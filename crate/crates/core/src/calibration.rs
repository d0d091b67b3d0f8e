//! Frozen regression bounds for the unspecified big-O constants: each is the
//! empirical supremum over a fixed sweep times a headroom factor.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const CALIBRATION_ENV: &str = "QUADWARING_CALIBRATION";
pub const CALIBRATION_VERSION: u32 = 1;
pub const HEADROOM: f64 = 1.25;

const EMBEDDED: &str = include_str!("../calibration.json");

/// Sweep ranges; fixed so that a regenerated file is comparable.
pub const GAUSS_P_MAX: u64 = 97;
pub const GAUSS_N_MAX: u32 = 3;
pub const NU_HAT_W_MAX: u64 = 1000;
pub const QR_P_MAX: u64 = 100_000;
pub const RESTRICTION_P_MIN: u64 = 11;
pub const RESTRICTION_P_MAX: u64 = 499;
pub const NORMALIZATION_N: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    pub version: u32,
    pub headroom: f64,
    /// `|G| <= C gcd(t, p^n) sqrt(p)`.
    pub gauss_c: f64,
    /// `|nu_hat(xi)| sqrt(min p) <= C`.
    pub nu_hat_c: f64,
    /// `|count - eta (p+1)/2| / (sqrt(p) ln p) <= C`.
    pub qr_interval_c: f64,
    /// `ratio <= 1 + K / p`.
    pub restriction_k: f64,
    /// `|sum nu_b - N| / N` at `N = 10^6` over the trend moduli.
    pub normalization_deviation: f64,
}

impl Calibration {
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED).expect("embedded calibration file is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let c: Calibration = serde_json::from_str(text).map_err(|e| Error::Calibration(e.to_string()))?;
        if c.version != CALIBRATION_VERSION {
            return Err(Error::Calibration(format!("unsupported version {}", c.version)));
        }
        let fields = [c.headroom, c.gauss_c, c.nu_hat_c, c.qr_interval_c, c.restriction_k, c.normalization_deviation];
        if fields.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Calibration("constants must be finite and nonnegative".into()));
        }
        Ok(c)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Calibration(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The file named by `QUADWARING_CALIBRATION` if set, else the embedded one.
    pub fn load() -> Result<Self> {
        match std::env::var_os(CALIBRATION_ENV) {
            Some(p) => Self::from_path(Path::new(&p)),
            None => Ok(Self::embedded()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("calibration serializes")
    }

    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(serde_json::to_vec(self).expect("calibration serializes")))
    }
}

/// Empirical suprema over the fixed sweeps, before headroom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSweep {
    pub gauss: f64,
    pub nu_hat: f64,
    pub qr_interval: f64,
    pub qr_argmax: (u64, f64),
    pub restriction: f64,
    pub normalization: f64,
}

impl CalibrationSweep {
    pub fn run() -> Result<Self> {
        let gauss = crate::charsums::gauss_bound_statistic(GAUSS_P_MAX, GAUSS_N_MAX);
        let nu_hat = crate::charsums::nu_hat_statistic(NU_HAT_W_MAX);
        let (qr_interval, p, eta) = crate::charsums::qr_interval_statistic(QR_P_MAX);
        let restriction = crate::additive::restriction_ratio_statistic(RESTRICTION_P_MIN, RESTRICTION_P_MAX);
        let mut normalization: f64 = 0.0;
        for (w, b) in crate::majorants::TREND_MODULI {
            let check = crate::majorants::normalization_check(b, w, NORMALIZATION_N)?;
            normalization = normalization.max(check.relative_deviation);
        }
        Ok(CalibrationSweep { gauss, nu_hat, qr_interval, qr_argmax: (p, eta), restriction, normalization })
    }

    pub fn freeze(&self) -> Calibration {
        Calibration {
            version: CALIBRATION_VERSION,
            headroom: HEADROOM,
            gauss_c: self.gauss * HEADROOM,
            nu_hat_c: self.nu_hat * HEADROOM,
            qr_interval_c: self.qr_interval * HEADROOM,
            restriction_k: self.restriction.max(0.0) * HEADROOM,
            normalization_deviation: self.normalization * HEADROOM,
        }
    }
}
