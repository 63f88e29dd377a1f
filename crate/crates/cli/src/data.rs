//! Dataset ingestion and generation.
//!
//! Converts between on-disk artifacts (PNG images, directories of grayscale
//! frames, `TNS1` tensors) and in-memory tensors, generates reproducible
//! random observation masks, and builds synthetic low-tubal-rank ground
//! truths for benchmarking.
//!
//! Conventions:
//! * Images load as `height x width x channels` tensors with values
//!   `0..=255` as reals; the row index is the image row.
//! * Pixel values are clamped to `[0, 255]` and rounded only when writing an
//!   image, never earlier, so scoring always sees raw solver output.
//! * All randomness flows through [`SeededRng`] and is documented well enough
//!   to reproduce from another language (see the mask and synthesis notes
//!   below).

use std::fs;
use std::path::Path;

use image::{DynamicImage, GrayImage, ImageError, ImageFormat, RgbImage};
use tcomp_core::algebra::t_product;
use tcomp_core::{ObservationMask, Tensor3};

use crate::formats::{read_tensor, FormatError};
use crate::rng::SeededRng;

/// Half-width of the uniform distribution used for synthetic factor entries.
///
/// Factor entries are uniform in `[-8, 8)`, which puts the product tensor's
/// entries on the same order of magnitude as 8-bit image data — the regime
/// the solver's default penalty parameter is tuned for.
const FACTOR_HALF_WIDTH: f64 = 8.0;

/// Errors from loading, generating, or writing datasets.
#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {detail}")]
    Image { path: String, detail: String },
    #[error("{detail}")]
    Shape { detail: String },
    #[error("{detail}")]
    InvalidArg { detail: String },
    #[error(transparent)]
    Format(#[from] FormatError),
}

impl DataError {
    fn io(path: &Path, source: std::io::Error) -> DataError {
        DataError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    fn image(path: &Path, detail: impl Into<String>) -> DataError {
        DataError::Image {
            path: path.display().to_string(),
            detail: detail.into(),
        }
    }

    fn shape(detail: impl Into<String>) -> DataError {
        DataError::Shape {
            detail: detail.into(),
        }
    }

    fn invalid(detail: impl Into<String>) -> DataError {
        DataError::InvalidArg {
            detail: detail.into(),
        }
    }

    /// True for problems with file contents or the filesystem (as opposed to
    /// a bad request); used to pick the process exit code.
    pub fn is_io(&self) -> bool {
        !matches!(self, DataError::InvalidArg { .. })
    }
}

fn from_image_error(path: &Path, err: ImageError) -> DataError {
    match err {
        ImageError::IoError(e) => DataError::io(path, e),
        other => DataError::image(path, other.to_string()),
    }
}

/// How random loss is applied to a tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MaskMode {
    /// Remove individual entries uniformly at random.
    Element,
    /// Remove whole `(row, column)` sites across every frontal slice, the
    /// way a damaged pixel loses all three color channels at once.
    Pixel,
}

impl std::fmt::Display for MaskMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MaskMode::Element => "element",
            MaskMode::Pixel => "pixel",
        })
    }
}

/// What kind of artifact an input path turned out to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    Image,
    Frames,
    Tensor,
}

impl InputKind {
    /// The loss mode used when the user does not pass one explicitly:
    /// pixel-wise loss for color images (channels vanish together), entry-wise
    /// loss for raw tensors and videos.
    pub fn default_mask_mode(self) -> MaskMode {
        match self {
            InputKind::Image => MaskMode::Pixel,
            InputKind::Frames | InputKind::Tensor => MaskMode::Element,
        }
    }
}

/// Loads an 8-bit RGB or grayscale PNG as a `height x width x {3,1}` tensor.
pub fn load_image(path: &Path) -> Result<Tensor3, DataError> {
    let img = image::open(path).map_err(|e| from_image_error(path, e))?;
    match img {
        DynamicImage::ImageRgb8(buf) => {
            let (w, h) = (buf.width() as usize, buf.height() as usize);
            Ok(Tensor3::from_fn(h, w, 3, |i, j, k| {
                buf.get_pixel(j as u32 - 1, i as u32 - 1).0[k - 1] as f64
            }))
        }
        DynamicImage::ImageLuma8(buf) => {
            let (w, h) = (buf.width() as usize, buf.height() as usize);
            Ok(Tensor3::from_fn(h, w, 1, |i, j, _| {
                buf.get_pixel(j as u32 - 1, i as u32 - 1).0[0] as f64
            }))
        }
        other => Err(DataError::image(
            path,
            format!(
                "unsupported pixel format {:?}: only 8-bit RGB or grayscale PNG is accepted",
                other.color()
            ),
        )),
    }
}

/// Saves a `n1 x n2 x 3` tensor as RGB PNG or `n1 x n2 x 1` as grayscale PNG.
///
/// Values are rounded and clamped to `0..=255` here and only here.
pub fn save_image(path: &Path, tensor: &Tensor3) -> Result<(), DataError> {
    let (n1, n2, n3) = tensor.dims();
    let quantize = |v: f64| v.round().clamp(0.0, 255.0) as u8;
    match n3 {
        3 => {
            let buf = RgbImage::from_fn(n2 as u32, n1 as u32, |x, y| {
                let (i, j) = (y as usize + 1, x as usize + 1);
                image::Rgb([
                    quantize(tensor.get(i, j, 1)),
                    quantize(tensor.get(i, j, 2)),
                    quantize(tensor.get(i, j, 3)),
                ])
            });
            buf.save_with_format(path, ImageFormat::Png)
                .map_err(|e| from_image_error(path, e))
        }
        1 => {
            let buf = GrayImage::from_fn(n2 as u32, n1 as u32, |x, y| {
                image::Luma([quantize(tensor.get(y as usize + 1, x as usize + 1, 1))])
            });
            buf.save_with_format(path, ImageFormat::Png)
                .map_err(|e| from_image_error(path, e))
        }
        other => Err(DataError::invalid(format!(
            "cannot save a tensor with {other} frontal slices as an image (need 1 or 3)"
        ))),
    }
}

/// Loads a directory of equally-sized 8-bit grayscale PNG frames, in
/// lexicographic filename order, as a `height x width x frame_count` tensor.
pub fn load_frames(dir: &Path) -> Result<Tensor3, DataError> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|e| DataError::io(dir, e))?
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| DataError::io(dir, e))?
        .into_iter()
        .map(|entry| entry.path())
        .filter(|p| {
            p.extension()
                .is_some_and(|ext| ext.eq_ignore_ascii_case("png"))
        })
        .collect();
    paths.sort_by_key(|p| p.file_name().map(|n| n.to_owned()));
    if paths.is_empty() {
        return Err(DataError::shape(format!(
            "{}: no PNG frames found",
            dir.display()
        )));
    }

    let mut frames = Vec::with_capacity(paths.len());
    let mut dims: Option<(usize, usize)> = None;
    for path in &paths {
        let img = image::open(path).map_err(|e| from_image_error(path, e))?;
        let DynamicImage::ImageLuma8(buf) = img else {
            return Err(DataError::image(
                path,
                format!(
                    "unsupported pixel format {:?}: frames must be 8-bit grayscale PNG",
                    img.color()
                ),
            ));
        };
        let (h, w) = (buf.height() as usize, buf.width() as usize);
        match dims {
            None => dims = Some((h, w)),
            Some(expected) if expected != (h, w) => {
                return Err(DataError::shape(format!(
                    "{}: frame size {h}x{w} differs from first frame {}x{}",
                    path.display(),
                    expected.0,
                    expected.1
                )));
            }
            Some(_) => {}
        }
        frames.push(buf);
    }

    let (n1, n2) = dims.unwrap();
    Ok(Tensor3::from_fn(n1, n2, frames.len(), |i, j, k| {
        frames[k - 1].get_pixel(j as u32 - 1, i as u32 - 1).0[0] as f64
    }))
}

/// Loads any supported input: a directory of frames, a `.png` image, or a
/// `.tns` tensor, classified by the path itself.
pub fn load_input(path: &Path) -> Result<(Tensor3, InputKind), DataError> {
    if path.is_dir() {
        return Ok((load_frames(path)?, InputKind::Frames));
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("png") => {
            Ok((load_image(path)?, InputKind::Image))
        }
        Some(ext) if ext.eq_ignore_ascii_case("tns") => {
            Ok((read_tensor(path)?, InputKind::Tensor))
        }
        _ => Err(DataError::invalid(format!(
            "{}: unrecognized input (expected a .png image, a .tns tensor, or a directory of frames)",
            path.display()
        ))),
    }
}

/// Generates a reproducible random observation mask.
///
/// * `element` mode removes exactly `floor(loss * n1*n2*n3)` entries chosen
///   uniformly without replacement.
/// * `pixel` mode removes exactly `floor(loss * n1*n2)` `(row, column)`
///   sites, each erasing the full tube across all `n3` frontal slices. Site
///   index `s` in `0..n1*n2` means row `s % n1`, column `s / n1` (0-based).
///
/// Selection is a partial Fisher-Yates shuffle driven by [`SeededRng`]: for
/// step `t = 0, 1, ...` swap positions `t` and `t + rng.below(count - t)` of
/// the identity permutation of `0..count`, then remove the first `remove`
/// positions. Identical seeds give identical masks on every platform.
pub fn random_mask(
    dims: (usize, usize, usize),
    loss: f64,
    mode: MaskMode,
    seed: u64,
) -> Result<ObservationMask, DataError> {
    random_mask_from(&mut SeededRng::new(seed), dims, loss, mode)
}

/// [`random_mask`] drawing from an existing generator stream.
pub fn random_mask_from(
    rng: &mut SeededRng,
    dims: (usize, usize, usize),
    loss: f64,
    mode: MaskMode,
) -> Result<ObservationMask, DataError> {
    if !(loss > 0.0 && loss < 1.0) {
        return Err(DataError::invalid(format!(
            "loss fraction must be strictly between 0 and 1, got {loss}"
        )));
    }
    let (n1, n2, n3) = dims;
    let total = n1 * n2 * n3;
    let count = match mode {
        MaskMode::Element => total,
        MaskMode::Pixel => n1 * n2,
    };
    let remove = (loss * count as f64).floor() as usize;
    let removed = sample_without_replacement(rng, count, remove);

    let mut bitmap = vec![true; total];
    for &site in &removed {
        match mode {
            MaskMode::Element => bitmap[site] = false,
            MaskMode::Pixel => {
                for k in 0..n3 {
                    bitmap[site + k * n1 * n2] = false;
                }
            }
        }
    }
    ObservationMask::from_bitmap(dims, bitmap)
        .map_err(|e| DataError::invalid(format!("generated mask is unusable: {e}")))
}

/// First `take` elements of a seeded Fisher-Yates shuffle of `0..count`.
fn sample_without_replacement(rng: &mut SeededRng, count: usize, take: usize) -> Vec<usize> {
    debug_assert!(take <= count);
    let mut order: Vec<usize> = (0..count).collect();
    for t in 0..take {
        let j = t + rng.below((count - t) as u64) as usize;
        order.swap(t, j);
    }
    order.truncate(take);
    order
}

/// Builds a synthetic tensor of tubal rank at most `rank` as the t-product
/// of two seeded random factors of shapes `n1 x rank x n3` and
/// `rank x n2 x n3`.
///
/// Factor entries are `(u - 0.5) * 16` with `u` drawn by
/// [`SeededRng::next_f64`] — i.e. uniform in `[-8, 8)` — consumed in tensor
/// linearization order (first index fastest), first factor entirely before
/// the second.
pub fn synthetic_low_rank(
    dims: (usize, usize, usize),
    rank: usize,
    rng: &mut SeededRng,
) -> Result<Tensor3, DataError> {
    let (n1, n2, n3) = dims;
    if rank == 0 || rank > n1.min(n2) {
        return Err(DataError::invalid(format!(
            "rank must be in 1..={}, got {rank}",
            n1.min(n2)
        )));
    }
    let mut draw = |_, _, _| (rng.next_f64() - 0.5) * 2.0 * FACTOR_HALF_WIDTH;
    let p = Tensor3::from_fn(n1, rank, n3, &mut draw);
    let q = Tensor3::from_fn(rank, n2, n3, &mut draw);
    Ok(t_product(&p, &q).expect("factor shapes are compatible by construction"))
}

/// A ground truth plus the observation mask applied to it, with enough
/// provenance to describe the run in a report.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub truth: Tensor3,
    pub mask: ObservationMask,
    pub provenance: Provenance,
}

/// Where a dataset came from.
#[derive(Debug, Clone)]
pub struct Provenance {
    /// Path of the input artifact, or a description for generated data.
    pub source: String,
    /// Mask origin: a file path, or the loss/mode/seed that generated it.
    pub mask_source: String,
    /// Seed used for any generated randomness (0 when nothing was generated).
    pub seed: u64,
}

impl Dataset {
    pub fn new(truth: Tensor3, mask: ObservationMask, provenance: Provenance) -> Result<Self, DataError> {
        if truth.dims() != mask.dims() {
            let (t1, t2, t3) = truth.dims();
            let (m1, m2, m3) = mask.dims();
            return Err(DataError::invalid(format!(
                "mask dimensions {m1}x{m2}x{m3} do not match data dimensions {t1}x{t2}x{t3}"
            )));
        }
        Ok(Dataset {
            truth,
            mask,
            provenance,
        })
    }
}
