#![no_main]

use besicover_core::Rational;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(q) = text.parse::<Rational>() {
        // display is canonical and parses back to the same value
        let shown = q.to_string();
        assert_eq!(shown.parse::<Rational>().unwrap(), q);
        let json = serde_json::to_string(&q).unwrap();
        assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), q);
    }
});
