//! Data-generating processes: a parametric partial VAR for estimator
//! checks and a supply/demand sector model that drives country panels.

pub mod dgp;
pub mod panel;
pub mod sector;
pub mod study;

pub use dgp::{simulate_var, DgpSpec, ExogenousDriver, SimulatedVar};
pub use panel::{generate_country_panel, generate_country_panel_with_common, MacroProcess};
pub use sector::{
    rate_shock_statics, sector_equilibrium, shock_comparative_statics, sign_checks, ChannelEffects, Equilibrium,
    MarketRegime, SectorCalibration,
};
pub use study::{generate_study, twelve_country_study, write_study, StudyCountry, StudyPanel, StudySpec, Tier};
