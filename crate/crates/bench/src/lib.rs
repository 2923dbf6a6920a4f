//! Fixtures shared by the criterion benches.

use noisybench_core::emulator::{synthetic_dataset, SyntheticKind};
use noisybench_core::{EmulatorConfig, EmulatorModel, Result, Surface, SurfaceSpec};

/// Surfaces covering the cheap, the trigonometric and the mixture-backed cases.
pub const SURFACES: [&str; 4] = ["dejong:d=8", "michalewicz:d=8", "rosenbrock:d=8", "everest"];

pub fn surface(spec: &str) -> Result<Surface> {
    Surface::new(spec.parse::<SurfaceSpec>()?)
}

/// Emulator of the given shape trained briefly on the sine dataset; only
/// the forward pass cost matters here.
pub fn emulator(depth: usize, width: usize) -> Result<EmulatorModel> {
    let table = synthetic_dataset(SyntheticKind::Sine, 200, 0.05, 0)?;
    let config = EmulatorConfig {
        hidden_depth: depth,
        hidden_width: width,
        epochs: 5,
        ..Default::default()
    };
    EmulatorModel::train(&table, &config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        for spec in SURFACES {
            surface(spec).unwrap();
        }
        assert_eq!(emulator(3, 48).unwrap().members.len(), 5);
    }
}
