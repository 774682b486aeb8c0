#![no_main]

use besicover_core::besicovitch::{besicovitch_violation, max_overlap};
use besicover_core::generators::make_paper_ultrametric;
use besicover_core::BallFamily;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(fam) = serde_json::from_str::<BallFamily>(text) else { return };
    assert!(fam.iter().all(|b| b.radius.is_positive() && b.kind == fam.kind()));
    let back: BallFamily = serde_json::from_str(&serde_json::to_string(&fam).unwrap()).unwrap();
    assert_eq!(back, fam);
    let space = make_paper_ultrametric(8);
    if fam.check_in(&space).is_ok() {
        let ov = max_overlap(&space, &fam);
        assert!(ov.max_overlap <= fam.len());
        let _ = besicovitch_violation(&space, &fam);
    }
});
