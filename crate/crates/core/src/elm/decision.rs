use serde::{Deserialize, Serialize};

/// Transmitted symbols of the channel-equalization task.
pub const NLC_SYMBOLS: [f64; 4] = [-3.0, -1.0, 1.0, 3.0];

/// How output nodes are turned into a decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TaskKind {
    /// One output node per class; the largest wins.
    MultiClassOneHot { classes: usize },
    /// A single output node; `y <= 0.5` is class 0.
    BinaryThreshold,
    /// A single output node snapped to the nearest of `{-3, -1, 1, 3}`.
    SymbolSnap,
}

impl TaskKind {
    pub fn output_nodes(&self) -> usize {
        match *self {
            TaskKind::MultiClassOneHot { classes } => classes,
            TaskKind::BinaryThreshold | TaskKind::SymbolSnap => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Prediction {
    Class(usize),
    Symbol(i32),
}

/// Applies the task's decision rule to the output layer.
///
/// Argmax ties go to the lowest class index; symbol ties to the smaller
/// symbol.
pub fn decide(outputs: &[f64], kind: TaskKind) -> Prediction {
    match kind {
        TaskKind::MultiClassOneHot { .. } => {
            let mut best = 0;
            for (i, &v) in outputs.iter().enumerate().skip(1) {
                if v > outputs[best] {
                    best = i;
                }
            }
            Prediction::Class(best)
        }
        TaskKind::BinaryThreshold => Prediction::Class(usize::from(outputs[0] > 0.5)),
        TaskKind::SymbolSnap => {
            let y = outputs[0];
            let mut best = NLC_SYMBOLS[0];
            for &s in &NLC_SYMBOLS[1..] {
                if (y - s).abs() < (y - best).abs() {
                    best = s;
                }
            }
            Prediction::Symbol(best as i32)
        }
    }
}
