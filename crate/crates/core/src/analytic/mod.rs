//! Groups with divisible parts, Deligne cohomology and the Leray spectral sequence
//! of the universal hyperplane section.

mod deligne;
mod group;
mod scenario;
mod spectral;

pub use deligne::{
    deligne_cubic, deligne_k3, deligne_k3_surface, deligne_projective_bundle, deligne_projective_space,
    deligne_table, deligne_tate, deligne_universal_section, HodgePiece,
};
pub use group::AnalyticGroup;
pub use scenario::{deligne_leray_scenario, run_scenario, scenario_e2, ScenarioInput, ScenarioReport, H0_NAME, H1_NAME};
pub use spectral::{
    classify_forced_zero, converge, homology_at, resolve_differentials, turn_page, Declaration, MorphismDescriptor,
    SSPage,
};
