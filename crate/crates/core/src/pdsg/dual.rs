use crate::formulation::{FlowProgram, RowOwner};

/// Multipliers of the dualized rows.
///
/// `lambda[h*C + c]` and `pi[g*C + c]` are flat per (hyperarc or group,
/// commodity). Budget multipliers are per node and refer to the normalized
/// row `-sum_k P[i,k] / P_i >= -1`; nodes without a budget row keep 0.
#[derive(Clone, Debug, PartialEq)]
pub struct DualPoint {
    /// Coding rows, `>= 0`.
    pub lambda: Vec<f64>,
    /// Arc-sum rows, `>= 0`.
    pub pi: Vec<f64>,
    /// Aggregate rows, free.
    pub nu: Vec<f64>,
    /// Capacity rows, `>= 0`.
    pub mu: Vec<f64>,
    /// Budget rows, `>= 0`.
    pub zeta: Vec<f64>,
}

impl DualPoint {
    pub fn zeros(hyperarcs: usize, commodities: usize, groups: usize, nodes: usize) -> Self {
        DualPoint {
            lambda: vec![0.0; hyperarcs * commodities],
            pi: vec![0.0; groups * commodities],
            nu: vec![0.0; hyperarcs],
            mu: vec![0.0; hyperarcs],
            zeta: vec![0.0; nodes],
        }
    }

    pub fn zeros_like(other: &DualPoint) -> Self {
        DualPoint {
            lambda: vec![0.0; other.lambda.len()],
            pi: vec![0.0; other.pi.len()],
            nu: vec![0.0; other.nu.len()],
            mu: vec![0.0; other.mu.len()],
            zeta: vec![0.0; other.zeta.len()],
        }
    }

    pub fn blocks(&self) -> [&[f64]; 5] {
        [&self.lambda, &self.pi, &self.nu, &self.mu, &self.zeta]
    }

    pub fn blocks_mut(&mut self) -> [&mut Vec<f64>; 5] {
        [&mut self.lambda, &mut self.pi, &mut self.nu, &mut self.mu, &mut self.zeta]
    }

    pub fn len(&self) -> usize {
        self.blocks().iter().map(|b| b.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.blocks().into_iter().flat_map(|b| b.iter().copied())
    }

    /// Whether every sign constraint holds.
    pub fn is_sign_feasible(&self) -> bool {
        [&self.lambda, &self.pi, &self.mu, &self.zeta]
            .iter()
            .all(|b| b.iter().all(|&v| v >= 0.0))
    }

    /// Spreads the multipliers over the program's rows; conservation rows
    /// get 0.
    pub fn to_row_duals(&self, program: &FlowProgram) -> Vec<f64> {
        let cc = program.index.commodities;
        program
            .rows
            .iter()
            .map(|row| match row.owner {
                RowOwner::Coding { hyperarc, commodity } => self.lambda[hyperarc * cc + commodity],
                RowOwner::ArcSum { group, commodity } => self.pi[group * cc + commodity],
                RowOwner::Aggregate { hyperarc } => self.nu[hyperarc],
                RowOwner::Capacity { hyperarc } => self.mu[hyperarc],
                RowOwner::Budget { node } => self.zeta[node],
                RowOwner::Conservation { .. } | RowOwner::CodingSum { .. } => 0.0,
            })
            .collect()
    }

    /// Inverse of [`DualPoint::to_row_duals`] on the dualized rows.
    pub fn from_row_duals(program: &FlowProgram, groups: usize, duals: &[f64]) -> Self {
        let idx = program.index;
        let cc = idx.commodities;
        let mut d = DualPoint::zeros(idx.hyperarcs, cc, groups, program.structure.node_count);
        for (row, &v) in program.rows.iter().zip(duals) {
            match row.owner {
                RowOwner::Coding { hyperarc, commodity } => d.lambda[hyperarc * cc + commodity] = v,
                RowOwner::ArcSum { group, commodity } => d.pi[group * cc + commodity] = v,
                RowOwner::Aggregate { hyperarc } => d.nu[hyperarc] = v,
                RowOwner::Capacity { hyperarc } => d.mu[hyperarc] = v,
                RowOwner::Budget { node } => d.zeta[node] = v,
                RowOwner::Conservation { .. } | RowOwner::CodingSum { .. } => {}
            }
        }
        d
    }
}
