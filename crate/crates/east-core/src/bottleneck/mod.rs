//! Lower-bound machinery built on a deterministic coarsening of
//! configurations: the collapse set and its boundary, interval-growing
//! certificates for boundary members, counting bounds on the escaping mass,
//! budgeted reachability closures, bottleneck ratios, and the doubling
//! ladder of chain lengths.

mod boundary;
mod bound;
mod chain;
mod gamma;
mod ladder;
mod reach;
mod stages;

pub use boundary::{
    boundary_astar, boundary_of, escape_decomposition, flank_has_vacancy, AstarMembers,
    BoundaryMember, EscapeDecomposition, SiteEscape,
};
pub use bound::{bottleneck_lower_bound, BottleneckBound};
pub use chain::{delta_chain, DeltaChain};
pub use gamma::{count_d_strings, enumerate_gamma};
pub use ladder::{block_ladder, BlockLadder, LadderRung};
pub use reach::{embedded_family_mass, reachable_set, u_n, v_n, ReachableSet};
pub use stages::{
    det_dynamics, det_passes, det_step, in_astar, stage_at, stage_rank, StageIndex,
};

/// Caps on the exhaustively scanned sizes.
pub mod caps {
    /// Largest `L` for which the full membership table is built.
    pub const MEMBERSHIP_SCAN: usize = 16;
    /// Largest `L` the budgeted reachability search accepts.
    pub const REACH_SEARCH: usize = 20;
}
