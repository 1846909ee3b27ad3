use crate::error::{Error, Result};

/// Rossby parameter and interfacial Froude number, shared by both layers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub beta: f64,
    pub froude: f64,
}

impl ModelParams {
    pub fn new(beta: f64, froude: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::branch("beta > 0", format!("beta = {beta}")));
        }
        if !(froude.is_finite() && froude > 0.0) {
            return Err(Error::branch("F > 0", format!("F = {froude}")));
        }
        Ok(ModelParams { beta, froude })
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { beta: 1.0, froude: 1.0 }
    }
}
