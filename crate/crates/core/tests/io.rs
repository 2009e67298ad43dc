use std::fs::File;
use std::io::BufWriter;

use npyz::WriterBuilder;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use tempfile::tempdir;
use topograph::image_io::{export_png_preview, export_tensor, load_image, load_tensor};
use topograph::topoimage::{build_multiview, TopoConfig};
use topograph::Tensor;

fn random_tensor(seed: u64, shape: [usize; 3]) -> Tensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Tensor::new(shape, (0..shape.iter().product()).map(|_| rng.gen::<f32>()).collect()).unwrap()
}

#[test]
fn independent_reader_sees_same_array() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("t.npy");
    let t = random_tensor(1, [4, 5, 6]);
    export_tensor(&t, &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let npy = npyz::NpyFile::new(&bytes[..]).unwrap();
    assert_eq!(npy.shape(), &[4, 5, 6]);
    assert_eq!(npy.order(), npyz::Order::C);
    let data: Vec<f32> = npy.into_vec().unwrap();
    assert_eq!(data, t.data());
    assert_eq!(load_tensor(&path).unwrap(), t);
}

#[test]
fn reader_accepts_independently_written_arrays() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("w.npy");
    let data: Vec<f64> = (0..24).map(|i| i as f64 / 24.0).collect();
    let mut writer = npyz::WriteOptions::<f64>::new()
        .default_dtype()
        .shape(&[2, 3, 4])
        .writer(BufWriter::new(File::create(&path).unwrap()))
        .begin_nd()
        .unwrap();
    writer.extend(data.iter().copied()).unwrap();
    writer.finish().unwrap();
    let t = load_tensor(&path).unwrap();
    assert_eq!(t.shape(), [2, 3, 4]);
    let expected: Vec<f32> = data.iter().map(|&v| v as f32).collect();
    assert_eq!(t.data(), expected.as_slice());
}

#[test]
fn repeated_exports_hash_identically() {
    let dir = tempdir().unwrap();
    let t = random_tensor(2, [49, 28, 28]);
    let hash = |name: &str| {
        let path = dir.path().join(name);
        export_tensor(&t, &path).unwrap();
        Sha256::digest(std::fs::read(path).unwrap())
    };
    assert_eq!(hash("a.npy"), hash("b.npy"));
}

fn write_rgb_png(path: &std::path::Path, side: u32, pixels: &[u8]) {
    let mut enc = png::Encoder::new(BufWriter::new(File::create(path).unwrap()), side, side);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    enc.write_header().unwrap().write_image_data(pixels).unwrap();
}

#[test]
fn png_decode_then_full_pipeline() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("img.png");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pixels: Vec<u8> = (0..224 * 224 * 3).map(|_| rng.gen()).collect();
    write_rgb_png(&path, 224, &pixels);

    let img = load_image(&path).unwrap();
    assert_eq!((img.width(), img.height(), img.channels()), (224, 224, 3));
    // interleaved RGB on disk, planar in memory
    assert_eq!(img.channel(1)[5], pixels[5 * 3 + 1] as f32 / 255.0);

    let views = build_multiview(&img, &TopoConfig::default()).unwrap();
    assert_eq!(views.len(), 2);
    for v in &views {
        assert_eq!(v.shape(), [49, 224, 224]);
        let out = dir.path().join("view.npy");
        export_tensor(v.tensor(), &out).unwrap();
        assert_eq!(&load_tensor(&out).unwrap(), v.tensor());
    }

    let preview = dir.path().join("preview.png");
    export_png_preview(views[0].tensor(), 0, &preview).unwrap();
    let back = load_image(&preview).unwrap();
    assert_eq!((back.width(), back.height(), back.channels()), (224, 224, 1));
}
