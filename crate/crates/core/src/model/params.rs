use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Fiber data used only to check the short-fiber regime.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberRegime {
    pub length: f64,
    /// Decay rate of the cavity fields into the fiber continuum.
    pub decay_rate: f64,
    pub light_speed: f64,
}

impl FiberRegime {
    /// `2 L nu / (2 pi c)`; at most one for a single resonant fiber mode.
    pub fn mode_parameter(&self) -> f64 {
        2.0 * self.length * self.decay_rate / (2.0 * std::f64::consts::PI * self.light_speed)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.length >= 0.0 && self.decay_rate >= 0.0 && self.light_speed > 0.0) {
            return Err(Error::InvalidParameter("fiber data must be non-negative with c > 0".into()));
        }
        let x = self.mode_parameter();
        if x > 1.0 {
            return Err(Error::LongFiber(x));
        }
        Ok(())
    }
}

/// Every coupling of the model individually.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub g_al: f64,
    pub g_ar: f64,
    pub g_bl: f64,
    pub g_cr: f64,
    pub omega_al: f64,
    pub omega_ar: f64,
    pub omega_bl: f64,
    pub omega_cr: f64,
    pub lambda_l: f64,
    pub lambda_r: f64,
    pub fiber: Option<FiberRegime>,
}

impl SystemParams {
    pub fn rates(&self) -> [(&'static str, f64); 10] {
        [
            ("g_al", self.g_al),
            ("g_ar", self.g_ar),
            ("g_bl", self.g_bl),
            ("g_cr", self.g_cr),
            ("omega_al", self.omega_al),
            ("omega_ar", self.omega_ar),
            ("omega_bl", self.omega_bl),
            ("omega_cr", self.omega_cr),
            ("lambda_l", self.lambda_l),
            ("lambda_r", self.lambda_r),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.rates() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} = {value} must be finite and non-negative")));
            }
        }
        if let Some(fiber) = &self.fiber {
            fiber.check()?;
        }
        Ok(())
    }
}

/// Uniform couplings: one `g`, one `lambda`, and the three drive amplitudes.
///
/// `omega1` drives both transitions of atom `a`, `omega2` atom `b`, `omega3`
/// atom `c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformParams {
    pub g: f64,
    pub lambda: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
}

impl UniformParams {
    pub fn new(g: f64, lambda: f64, omega1: f64, omega2: f64, omega3: f64) -> Self {
        UniformParams { g, lambda, omega1, omega2, omega3 }
    }

    /// `(1 + 2 lambda^2 / g^2)^(1/2)`
    pub fn chi(&self) -> f64 {
        (1.0 + 2.0 * self.lambda * self.lambda / (self.g * self.g)).sqrt()
    }

    /// Dark-space coupling scale `lambda / (g chi)`.
    pub fn dark_coupling(&self) -> f64 {
        self.lambda / (self.g * self.chi())
    }

    pub fn validate(&self) -> Result<()> {
        self.to_system().validate()
    }

    pub fn to_system(&self) -> SystemParams {
        SystemParams {
            g_al: self.g,
            g_ar: self.g,
            g_bl: self.g,
            g_cr: self.g,
            omega_al: self.omega1,
            omega_ar: self.omega1,
            omega_bl: self.omega2,
            omega_cr: self.omega3,
            lambda_l: self.lambda,
            lambda_r: self.lambda,
            fiber: None,
        }
    }
}

impl From<UniformParams> for SystemParams {
    fn from(p: UniformParams) -> Self {
        p.to_system()
    }
}
