//! Image decoding and tensor export.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use crate::error::{Error, Result};
use crate::npy;

/// A decoded image with planar, row-major samples in `[0, 1]`.
///
/// Channel `c`, row `y`, column `x` lives at `data[(c * height + y) * width + x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f32>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::Shape(format!(
                "images have 1 or 3 channels, got {channels}"
            )));
        }
        if width == 0 || height == 0 {
            return Err(Error::Shape(format!("empty image {width}x{height}")));
        }
        if data.len() != width * height * channels {
            return Err(Error::Shape(format!(
                "{width}x{height}x{channels} image needs {} samples, got {}",
                width * height * channels,
                data.len()
            )));
        }
        if let Some(index) = data.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Shape(format!(
                "sample {index} = {} lies outside [0, 1]",
                data[index]
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn channel(&self, c: usize) -> &[f32] {
        let plane = self.width * self.height;
        &self.data[c * plane..(c + 1) * plane]
    }

    /// The image as a `(channels, height, width)` tensor.
    pub fn to_tensor(&self) -> Tensor {
        Tensor {
            shape: [self.channels, self.height, self.width],
            data: self.data.clone(),
        }
    }
}

/// A finite `(C, H, W)` tensor of 32-bit floats in C order.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: [usize; 3],
    data: Vec<f32>,
}

impl Tensor {
    pub fn new(shape: [usize; 3], data: Vec<f32>) -> Result<Self> {
        let expected = shape.iter().product::<usize>();
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "shape {shape:?} needs {expected} values, got {}",
                data.len()
            )));
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: [usize; 3]) -> Self {
        Self {
            shape,
            data: vec![0.0; shape.iter().product()],
        }
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn channels(&self) -> usize {
        self.shape[0]
    }

    pub fn height(&self) -> usize {
        self.shape[1]
    }

    pub fn width(&self) -> usize {
        self.shape[2]
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    pub fn channel(&self, c: usize) -> &[f32] {
        let plane = self.shape[1] * self.shape[2];
        &self.data[c * plane..(c + 1) * plane]
    }

    pub(crate) fn from_parts_unchecked(shape: [usize; 3], data: Vec<f32>) -> Self {
        debug_assert_eq!(shape.iter().product::<usize>(), data.len());
        Self { shape, data }
    }
}

/// Decode an 8- or 16-bit grayscale or RGB PNG. Alpha is dropped.
pub fn load_image(path: &Path) -> Result<RasterImage> {
    use png::{BitDepth, ColorType, Transformations};

    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut decoder = png::Decoder::new(file);
    decoder.set_transformations(Transformations::IDENTITY);
    let decode_err = |e: png::DecodingError| Error::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut reader = decoder.read_info().map_err(decode_err)?;
    let mut buf = vec![0u8; reader.output_buffer_size()];
    let frame = reader.next_frame(&mut buf).map_err(decode_err)?;
    let bytes = &buf[..frame.buffer_size()];

    let (stored, kept) = match frame.color_type {
        ColorType::Grayscale => (1, 1),
        ColorType::GrayscaleAlpha => (2, 1),
        ColorType::Rgb => (3, 3),
        ColorType::Rgba => (4, 3),
        ColorType::Indexed => {
            return Err(Error::UnsupportedColor {
                path: path.to_path_buf(),
                model: "palette (indexed color)".into(),
            })
        }
    };
    let samples: Vec<f32> = match frame.bit_depth {
        BitDepth::Eight => bytes.iter().map(|&b| b as f32 / 255.0).collect(),
        BitDepth::Sixteen => bytes
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f32 / 65535.0)
            .collect(),
        depth => {
            return Err(Error::UnsupportedColor {
                path: path.to_path_buf(),
                model: format!("{depth:?} bit depth"),
            })
        }
    };

    let (width, height) = (frame.width as usize, frame.height as usize);
    let plane = width * height;
    let mut data = vec![0.0f32; plane * kept];
    for (pixel, chunk) in samples.chunks_exact(stored).take(plane).enumerate() {
        for c in 0..kept {
            data[c * plane + pixel] = chunk[c];
        }
    }
    RasterImage::new(width, height, kept, data)
}

/// Write `t` as an NPY v1.0 `<f4` array of shape `(C, H, W)`.
pub fn export_tensor(t: &Tensor, path: &Path) -> Result<()> {
    if let Some(index) = t.data.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    npy::save(path, &t.shape, &t.data)
}

pub fn load_tensor(path: &Path) -> Result<Tensor> {
    let arr = npy::load(path)?;
    let shape: [usize; 3] = arr.shape.as_slice().try_into().map_err(|_| {
        Error::Npy(format!(
            "{} holds shape {:?}, expected (C, H, W)",
            path.display(),
            arr.shape
        ))
    })?;
    Tensor::new(shape, arr.data)
}

/// Rescale one channel to `0..=255`, rounding half to even. A constant
/// channel maps to all zeros.
pub fn preview_bytes(t: &Tensor, channel: usize) -> Result<Vec<u8>> {
    if channel >= t.channels() {
        return Err(Error::ChannelOutOfRange {
            channel,
            channels: t.channels(),
        });
    }
    let plane = t.channel(channel);
    let (lo, hi) = plane
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v as f64), hi.max(v as f64))
        });
    let range = hi - lo;
    Ok(plane
        .iter()
        .map(|&v| {
            if range > 0.0 {
                ((v as f64 - lo) / range * 255.0).round_ties_even() as u8
            } else {
                0
            }
        })
        .collect())
}

/// Write one channel of `t` as an 8-bit grayscale PNG.
pub fn export_png_preview(t: &Tensor, channel: usize, path: &Path) -> Result<()> {
    let pixels = preview_bytes(t, channel)?;
    write_gray_png(path, t.width(), t.height(), &pixels)
}

pub(crate) fn write_gray_png(path: &Path, width: usize, height: usize, pixels: &[u8]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), width as u32, height as u32);
    encoder.set_color(png::ColorType::Grayscale);
    encoder.set_depth(png::BitDepth::Eight);
    let encode_err = |e: png::EncodingError| match e {
        png::EncodingError::IoError(io) => Error::io(path, io),
        other => Error::Decode {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    };
    let mut writer = encoder.write_header().map_err(encode_err)?;
    writer.write_image_data(pixels).map_err(encode_err)?;
    writer.finish().map_err(encode_err)
}
