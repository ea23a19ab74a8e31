//! Closed-form and semi-analytic results.

pub mod charfn;
pub mod diagnostic;
pub mod poles;
pub mod series;
pub mod spectrum;
pub mod steady;

pub use charfn::{CharKind, CharacteristicFunction, DmOrder};
pub use diagnostic::{dm_rabi_diagnostic, tail_variance};
pub use poles::{find_poles, Pole, SearchBox};
pub use series::{series_cm, series_dm, SeriesEstimate};
pub use spectrum::{spectrum, Spectrum};
pub use steady::{dark_overlap, normal_modes, steady_state_dm, NormalModeSet};
