#![no_main]

use besicover_core::generators::GenSpec;
use libfuzzer_sys::fuzz_target;

// Larger spaces are valid but slow to build; they add nothing to parsing.
const BUILD_LIMIT: usize = 256;

fn size(spec: &GenSpec) -> Option<usize> {
    match *spec {
        GenSpec::PaperUltrametric { n } | GenSpec::ZeroOne { n } | GenSpec::RandomUltrametric { n, .. } => Some(n),
        GenSpec::GridSquare { n } => n.checked_mul(n),
        GenSpec::Lattice { dim, side, .. } => u32::try_from(dim).ok().and_then(|d| side.checked_pow(d)),
    }
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let inline = text.parse::<GenSpec>();
    let json = GenSpec::from_json(text);
    for spec in [inline, json].into_iter().flatten() {
        if size(&spec).is_some_and(|n| n <= BUILD_LIMIT) {
            if let Ok(space) = spec.build() {
                assert!(!space.is_empty());
            }
        }
    }
});
