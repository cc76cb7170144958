//! Graph families, Laplacian spectra and the localization-decay experiment.

mod approx;
mod decay;
mod graph;
mod spectral;

pub use approx::{projection_approximant, Approximant, Method};
pub use decay::{box_space, decay_experiment, DecayRow};
pub use graph::{cayley_sl2, family, FamilySpec, Multigraph, DEFAULT_ORDER_CAP};
pub use spectral::{cheeger, laplacian, spectrum, Cheeger, SpectralData, CHEEGER_CAP};
