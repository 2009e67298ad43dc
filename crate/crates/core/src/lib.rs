//! # topograph
//!
//! Local-topology encodings of raster images ("TopoImages").
//!
//! The pipeline runs in four stages:
//!
//! 1. [`filtration`] turns a decoded [`RasterImage`] into a scalar field
//!    (intensity or Laplacian-gradient view).
//! 2. [`cubical`] computes the super-level-set persistence diagram of a
//!    scalar field on its cubical complex (pixels as vertices).
//! 3. [`persistence_image`] vectorizes a diagram into a fixed-resolution
//!    persistence image.
//! 4. [`topoimage`] tiles an image into patches, runs stages 2-3 per patch
//!    and writes each flattened persistence image into every pixel of its
//!    patch, giving a `(C, H, W)` tensor.
//!
//! [`fusion`] then combines multi-view TopoImages with the source image,
//! either through a forward-only convolutional fusion module or through
//! the concatenation / mean-pooling baselines. Tensors leave the library as
//! NPY files through [`image_io`].
//!
//! ```
//! use topograph::cubical::compute_diagram;
//! use topograph::filtration::ScalarGrid;
//!
//! // A single loop: border pixels at 1, the center at 0.
//! let ring = ScalarGrid::new(3, 3, vec![1., 1., 1., 1., 0., 1., 1., 1., 1.]).unwrap();
//! let diagram = compute_diagram(&ring);
//! assert_eq!(diagram.dimension(0).count(), 1);
//! assert_eq!(diagram.dimension(1).count(), 1);
//! ```

pub mod cubical;
pub mod error;
pub mod filtration;
pub mod fusion;
pub mod image_io;
pub mod npy;
pub mod persistence_image;
pub mod topoimage;

pub use error::{Error, Result};
pub use filtration::{FiltrationKind, ScalarGrid};
pub use image_io::{RasterImage, Tensor};
