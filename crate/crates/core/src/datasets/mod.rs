//! Synthetic samplers, grid images, and file ingestion for the harnesses.

mod image;
mod io;
mod sampler;
mod synthetic;

pub use image::{embed_and_translate, image_to_distribution, GridImage};
pub use io::{
    load_grid_image, load_idx_images, load_idx_labels, load_labeled_manifest, load_named_manifest, load_point_cloud,
    load_sequence_manifest, save_grid_image, save_point_cloud, write_point_cloud,
};
pub use sampler::{
    derive_seed, random_translation, random_unit_vector, round_to_pixels, sample_distribution, translate_distribution,
    Family, SamplerSpec,
};
pub use synthetic::{render_shape, synthetic_digits, LabeledImage, Shape, DIGIT_SIZE};
