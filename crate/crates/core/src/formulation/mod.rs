//! Arc-graph expansion and assembly of the min-power multicast LP.
//!
//! Counting, with `H` hyperarcs, `A` arcs, `G` arc groups, `N` nodes, `M`
//! sessions, `C = sum_m T_m` commodities and `S` nodes that send:
//!
//! * variables: `H*C + A*C + H*M + 2*H`
//! * rows: `H*C` coding + `G*C` arc-sum + `H` aggregate + `H` capacity +
//!   `S` budget + `N*C` conservation
//!
//! For a full broadcast decomposition `A = G = H` and `S = N`.

mod arc_graph;
mod assemble;
mod feasibility;
mod lp_format;
mod program;

pub use arc_graph::{build_arc_graph, Arc, ArcGraph, ArcGroup, Chain};
pub use assemble::{assemble_program, CodingSemantics};
pub use feasibility::{check_feasibility, Feasibility, PHASE1_TOL};
pub use lp_format::to_lp_format;
pub use program::{
    Commodity, FlowProgram, Residuals, Row, RowKind, RowOwner, Sense, Structure, VarKind, VariableIndex,
};

use crate::error::Result;
use crate::model::{decompose_broadcast, Hyperarc, NetworkInstance};

/// An instance with its hyperarcs, arc graph and assembled program.
#[derive(Clone, Debug)]
pub struct Problem {
    pub instance: NetworkInstance,
    pub hyperarcs: Vec<Hyperarc>,
    pub arc_graph: ArcGraph,
    pub program: FlowProgram,
}

impl Problem {
    pub fn build(instance: NetworkInstance) -> Result<Self> {
        Self::build_with(instance, CodingSemantics::Max)
    }

    pub fn build_with(instance: NetworkInstance, semantics: CodingSemantics) -> Result<Self> {
        let hyperarcs = decompose_broadcast(&instance)?;
        Self::from_hyperarcs(instance, hyperarcs, semantics)
    }

    /// Uses a given hyperarc list instead of the broadcast decomposition.
    pub fn from_hyperarcs(
        instance: NetworkInstance,
        hyperarcs: Vec<Hyperarc>,
        semantics: CodingSemantics,
    ) -> Result<Self> {
        let arc_graph = build_arc_graph(&hyperarcs)?;
        let program = assemble_program(&instance, &hyperarcs, &arc_graph, semantics)?;
        Ok(Problem {
            instance,
            hyperarcs,
            arc_graph,
            program,
        })
    }
}
