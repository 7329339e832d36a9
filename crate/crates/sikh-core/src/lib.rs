//! Exact Khovanov-type homology for links in thickened punctured disks.
//!
//! A link diagram lives on a disk with `n` punctures. Resolving all crossings
//! produces the cube of resolutions; each cube edge is a band surgery, and the
//! band-surgery maps carry a deformation parameter `λ` from the coefficient
//! ring. Homology is computed exactly: Betti numbers over `F2` and `Q`,
//! invariant factors over `Z`. At `λ = 0` the construction specializes to
//! annular (Asaeda–Przytycki–Sikora style) homology.
//!
//! Modules follow the pipeline: [`coeff`] (exact scalars), [`planar`] (circles
//! on the punctured disk), [`diagram`] (link diagrams and resolutions),
//! [`tqft`] (state spaces and saddle maps), [`cube`] (the complex), and
//! [`homology`] (elimination and Smith normal form). [`morse`] builds diagrams
//! from sweep words; [`skd`] reads and writes the diagram file format.

pub mod coeff;
pub mod cube;
pub mod diagram;
pub mod error;
pub mod homology;
pub mod matrix;
pub mod morse;
pub mod planar;
pub mod skd;
pub mod tqft;

pub use coeff::{Coeff, FieldCoeff, Lambda, RingKind, F2};
pub use error::{Error, Result};
pub use planar::{CircleClass, Orientation, Surface, WindingVector};
