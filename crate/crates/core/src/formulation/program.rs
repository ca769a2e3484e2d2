//! Solver-neutral sparse LP: `min c·u` over `u >= 0` subject to tagged rows
//! `a·u >= b` or `a·u = b`.

/// One (session, sink) pair. Flow for it is routed from the session source to
/// that sink only.
#[derive(Clone, Debug, PartialEq)]
pub struct Commodity {
    /// Position of the session in the instance's session list.
    pub session: usize,
    pub session_id: usize,
    /// Node positions (not ids).
    pub source: usize,
    pub sink: usize,
    pub demand: f64,
}

/// Dense layout of the program's variables.
///
/// With `H` hyperarcs, `A` arcs, `C` commodities and `M` sessions:
///
/// | block | meaning | count |
/// |---|---|---|
/// | `x[h][c]` | flow of commodity `c` carried by hyperarc `h` | `H*C` |
/// | `f[e][c]` | flow of commodity `c` on arc `e` | `A*C` |
/// | `y[h][m]` | coded rate of session `m` on hyperarc `h` | `H*M` |
/// | `z[h]` | total rate on hyperarc `h` | `H` |
/// | `P[h]` | power spent on hyperarc `h` | `H` |
///
/// For broadcast decompositions every hyperarc adds exactly one receiver, so
/// `A = H` and the total is `2*H*C + H*M + 2*H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VariableIndex {
    pub hyperarcs: usize,
    pub arcs: usize,
    pub commodities: usize,
    pub sessions: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    HyperarcFlow { hyperarc: usize, commodity: usize },
    ArcFlow { arc: usize, commodity: usize },
    Coded { hyperarc: usize, session: usize },
    Total { hyperarc: usize },
    Power { hyperarc: usize },
}

impl VariableIndex {
    pub fn x(&self, hyperarc: usize, commodity: usize) -> usize {
        hyperarc * self.commodities + commodity
    }

    pub fn flow(&self, arc: usize, commodity: usize) -> usize {
        self.hyperarcs * self.commodities + arc * self.commodities + commodity
    }

    pub fn y(&self, hyperarc: usize, session: usize) -> usize {
        (self.hyperarcs + self.arcs) * self.commodities + hyperarc * self.sessions + session
    }

    pub fn z(&self, hyperarc: usize) -> usize {
        (self.hyperarcs + self.arcs) * self.commodities + self.hyperarcs * self.sessions + hyperarc
    }

    pub fn power(&self, hyperarc: usize) -> usize {
        self.z(0) + self.hyperarcs + hyperarc
    }

    pub fn len(&self) -> usize {
        (self.hyperarcs + self.arcs) * self.commodities + self.hyperarcs * self.sessions + 2 * self.hyperarcs
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self, j: usize) -> VarKind {
        let c = self.commodities;
        let hc = self.hyperarcs * c;
        let ac = self.arcs * c;
        let hm = self.hyperarcs * self.sessions;
        if j < hc {
            VarKind::HyperarcFlow { hyperarc: j / c, commodity: j % c }
        } else if j < hc + ac {
            let k = j - hc;
            VarKind::ArcFlow { arc: k / c, commodity: k % c }
        } else if j < hc + ac + hm {
            let k = j - hc - ac;
            VarKind::Coded { hyperarc: k / self.sessions, session: k % self.sessions }
        } else if j < hc + ac + hm + self.hyperarcs {
            VarKind::Total { hyperarc: j - hc - ac - hm }
        } else {
            assert!(j < self.len(), "variable {j} out of range");
            VarKind::Power { hyperarc: j - hc - ac - hm - self.hyperarcs }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowKind {
    /// `y[h][m] - x[h][c] >= 0` (or `y - sum_t x >= 0` under sum semantics)
    Coding,
    /// `sum_{h in group} x[h][c] - sum_{e in group} f[e][c] >= 0`
    ArcSum,
    /// `z[h] - sum_m y[h][m] = 0`
    Aggregate,
    /// `(gamma*P[h] - z[h]) / max(gamma, 1) >= 0`
    Capacity,
    /// `-sum_k P[i,k] / P_i >= -1`
    Budget,
    /// `out - in = s_i(c)`
    Conservation,
}

impl RowKind {
    pub fn label(self) -> &'static str {
        match self {
            RowKind::Coding => "coding",
            RowKind::ArcSum => "arcsum",
            RowKind::Aggregate => "aggregate",
            RowKind::Capacity => "capacity",
            RowKind::Budget => "budget",
            RowKind::Conservation => "conservation",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Ge,
    Eq,
}

/// Which structural element a row belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowOwner {
    Coding { hyperarc: usize, commodity: usize },
    CodingSum { hyperarc: usize, session: usize },
    ArcSum { group: usize, commodity: usize },
    Aggregate { hyperarc: usize },
    Capacity { hyperarc: usize },
    Budget { node: usize },
    Conservation { commodity: usize, node: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub kind: RowKind,
    pub sense: Sense,
    pub owner: RowOwner,
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, u: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * u[j]).sum()
    }

    /// Amount by which `u` violates the row (0 when satisfied).
    pub fn violation(&self, u: &[f64]) -> f64 {
        let r = self.activity(u) - self.rhs;
        match self.sense {
            Sense::Ge => (-r).max(0.0),
            Sense::Eq => r.abs(),
        }
    }
}

/// Structural data needed by decomposition methods, kept alongside the rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Structure {
    pub node_count: usize,
    pub commodities: Vec<Commodity>,
    /// Session demands in session order.
    pub session_demands: Vec<f64>,
    /// `(tail, head)` node positions per arc.
    pub arc_ends: Vec<(usize, usize)>,
    pub hyperarc_sender: Vec<usize>,
    pub gamma: Vec<f64>,
    /// Power budget per node position.
    pub budgets: Vec<f64>,
    /// `(sender, owners, arcs)` per arc group.
    pub groups: Vec<(usize, Vec<usize>, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowProgram {
    pub index: VariableIndex,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    pub names: Vec<String>,
    pub structure: Structure,
}

/// Largest row violation of a point, split by row family.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Residuals {
    pub conservation: f64,
    pub capacity: f64,
    pub budget: f64,
    pub other: f64,
    pub negativity: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.conservation
            .max(self.capacity)
            .max(self.budget)
            .max(self.other)
            .max(self.negativity)
    }
}

impl FlowProgram {
    pub fn var_count(&self) -> usize {
        self.objective.len()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn objective_value(&self, u: &[f64]) -> f64 {
        self.objective.iter().zip(u).map(|(c, x)| c * x).sum()
    }

    pub fn count_rows(&self, kind: RowKind) -> usize {
        self.rows.iter().filter(|r| r.kind == kind).count()
    }

    pub fn residuals(&self, u: &[f64]) -> Residuals {
        let mut res = Residuals {
            negativity: u.iter().fold(0.0f64, |m, &x| m.max(-x)),
            ..Residuals::default()
        };
        for row in &self.rows {
            let v = row.violation(u);
            let slot = match row.kind {
                RowKind::Conservation => &mut res.conservation,
                RowKind::Capacity => &mut res.capacity,
                RowKind::Budget => &mut res.budget,
                _ => &mut res.other,
            };
            *slot = slot.max(v);
        }
        res
    }

    /// `c - A^T v` for row multipliers `v` (one per row).
    pub fn reduced_costs(&self, duals: &[f64]) -> Vec<f64> {
        let mut d = self.objective.clone();
        for (row, &v) in self.rows.iter().zip(duals) {
            if v != 0.0 {
                for &(j, a) in &row.coeffs {
                    d[j] -= a * v;
                }
            }
        }
        d
    }

    /// Power per hyperarc from a full point.
    pub fn powers(&self, u: &[f64]) -> Vec<f64> {
        (0..self.index.hyperarcs).map(|h| u[self.index.power(h)]).collect()
    }
}
