use serde::{Deserialize, Serialize};

use super::SimError;
use crate::circuit::{GateKind, Instruction};

/// Post-gate depolarizing noise keyed by gate name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p1: f64,
    #[serde(default)]
    pub gates1: Vec<GateKind>,
    pub p2: f64,
    #[serde(default)]
    pub gates2: Vec<GateKind>,
}

impl Default for NoiseModel {
    fn default() -> Self {
        use GateKind::*;
        NoiseModel {
            p1: 3e-5,
            gates1: vec![Rz, Rx, Ry, H, S, Sdg, T, Tdg, X, Y, Z],
            p2: 0.002,
            gates2: vec![Cx, Cz, Swap, Rzz, Rxx, Ryy],
        }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel {
            p1: 0.0,
            p2: 0.0,
            ..Default::default()
        }
    }

    /// Default gate lists with the given rates.
    pub fn depolarizing(p1: f64, p2: f64) -> Self {
        NoiseModel {
            p1,
            p2,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SimError::InvalidNoise(format!(
                    "{name} = {p} is outside [0, 1]"
                )));
            }
        }
        if let Some(g) = self
            .gates1
            .iter()
            .find(|g| g.num_qubits() != Some(1) || !g.is_unitary())
        {
            return Err(SimError::InvalidNoise(format!(
                "gates1 lists non-1-qubit gate {g}"
            )));
        }
        if let Some(g) = self.gates2.iter().find(|g| g.num_qubits() != Some(2)) {
            return Err(SimError::InvalidNoise(format!(
                "gates2 lists non-2-qubit gate {g}"
            )));
        }
        Ok(())
    }

    /// Depolarizing probability attached to `inst`, zero when it is not listed.
    pub fn error_rate(&self, inst: &Instruction) -> f64 {
        let kind = inst.kind();
        if self.gates1.contains(&kind) {
            self.p1
        } else if self.gates2.contains(&kind) {
            self.p2
        } else {
            0.0
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let m: NoiseModel = serde_json::from_str(
            r#"{"p1": 3e-5, "gates1": ["rz","rx","ry","h","s","sdg","t","tdg","x","y","z"],
                "p2": 0.002, "gates2": ["cx","cz","swap","rzz","rxx","ryy"]}"#,
        )
        .unwrap();
        assert_eq!(m, NoiseModel::default());
        assert!(m.validate().is_ok());
    }

    #[test]
    fn rejects_bad_probability() {
        assert!(NoiseModel::depolarizing(0.0, 1.5).validate().is_err());
        let mut m = NoiseModel::default();
        m.gates2.push(GateKind::H);
        assert!(m.validate().is_err());
    }

    #[test]
    fn rates_by_gate() {
        let m = NoiseModel::default();
        assert_eq!(
            m.error_rate(&Instruction::new(GateKind::Cx, &[0, 1])),
            0.002
        );
        assert_eq!(m.error_rate(&Instruction::new(GateKind::H, &[0])), 3e-5);
        assert_eq!(m.error_rate(&Instruction::measure(0, 0)), 0.0);
    }
}
