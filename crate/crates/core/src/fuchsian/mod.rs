//! Surface groups: presentations, multiplier systems, Dirichlet domains and
//! the length spectrum.

pub mod cache;
pub mod domain;
pub mod multiplier;
pub mod presentation;
pub mod spectrum;
pub mod walk;
pub mod word;

pub use cache::{load_or_enumerate, read_spectrum, spectrum_csv, write_spectrum};
pub use domain::DirichletDomain;
pub use multiplier::{build_multiplier, evaluate_chi, MultiplierSystem};
pub use presentation::{
    build_bolza, build_regular, load_presentation, load_presentation_config, RelatorLift,
    SurfacePresentation,
};
pub use spectrum::{
    enumerate_geodesics, enumerate_geodesics_with, fingerprint, search_radius, GeodesicClass,
    LengthSpectrum, Method, DEFAULT_BUDGET,
};
pub use walk::{ball_count, walk_ball};
pub use word::Word;
