#![no_main]

use besicover_core::io::{parse_space, SpaceDocument};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(SpaceDocument::Table(_)) = SpaceDocument::parse(text) {
        if let Ok(space) = parse_space(text) {
            // the canonical table is a fixed point
            let canon = space.to_table().to_json();
            let again = parse_space(&canon).unwrap();
            assert_eq!(again.content_hash(), space.content_hash());
            assert_eq!(again.to_table().to_json(), canon);
        }
    }
});
