//! Regenerates the sample files under docs/samples from the built-in
//! fixtures, keeping files and code byte-identical.

use std::fs;
use std::path::PathBuf;

use wangkit::formats;
use wangkit::render::{render_pattern, RenderSpec};
use wangkit_core::fixtures;
use wangkit_core::selfsim::{generate_pattern, ChoiceSequence, DegenerateStyle};

fn main() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/samples");
    fs::create_dir_all(&dir).unwrap();
    let write = |name: &str, text: String| {
        fs::write(dir.join(name), text).unwrap();
        println!("wrote {}", name);
    };
    write("single.tiles", formats::serialize_palette(&fixtures::single_palette()));
    write("checker.tiles", formats::serialize_palette(&fixtures::checker_palette()));
    write("stripes6.tiles", formats::serialize_palette(&fixtures::stripes6_palette()));
    write("altstripe.tiles", formats::serialize_palette(&fixtures::alt_stripe_palette().palette));
    write("no11.tiles", formats::serialize_palette(&fixtures::no11_stripe_palette().palette));
    write("inc3.tm", formats::serialize_tm(&fixtures::inc3_tm()));
    write("bitcopy.tm", formats::serialize_tm(&fixtures::bitcopy_tm()));

    // A 64-bit window with a 16-zero run planted at position 21, flanked by
    // ones; the background keeps every eighth bit set so no other long run
    // appears.
    let mut bits = vec![0u8; 64];
    let mut seed = 0x5eedu64;
    for (i, b) in bits.iter_mut().enumerate() {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        *b = if i % 8 == 7 { 1 } else { ((seed >> 40) & 1) as u8 };
    }
    for i in 21..37 {
        bits[i] = 0;
    }
    bits[20] = 1;
    bits[37] = 1;
    write("planted64.bits", formats::serialize_bits(&bits));

    // Golden render of one rank-4 square with its underlying hierarchy.
    let fixtures_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/fixtures");
    fs::create_dir_all(&fixtures_dir).unwrap();
    let ch = ChoiceSequence::new(4, 0, 0);
    let win = generate_pattern(&ch, 6, 6, 36, 36, &DegenerateStyle::default()).unwrap();
    let svg = render_pattern(&win, &RenderSpec::default()).unwrap();
    fs::write(fixtures_dir.join("selfsim_r4.svg"), &svg).unwrap();
    println!("wrote selfsim_r4.svg");

    // The allowed-cross catalog, frozen for the verifier tests.
    let catalog = wangkit_core::selfsim::CrossCatalog::standard();
    fs::write(fixtures_dir.join("cross_catalog.txt"), catalog.to_text()).unwrap();
    println!("wrote cross_catalog.txt ({} crosses)", catalog.crosses.len());
}
