#![allow(dead_code)]

pub mod props;

use mmrus_core::mm::{parse_mm_source, Database};

pub const MINI: &str = include_str!("../fixtures/mini.mm");
pub const DV: &str = include_str!("../fixtures/dv.mm");
pub const A1D_RUS: &str = include_str!("../fixtures/a1d.rus");
pub const OUTLINE: &str = include_str!("../fixtures/outline.mm");

pub const A1D_PROOF: &str = "wph wps wch wps wi a1d.1 wps wch ax-1 syl";

pub fn db(src: &str) -> Database {
    parse_mm_source(src).unwrap_or_else(|e| panic!("{e}"))
}

/// A corrupted fixture, the label whose proof should fail and the expected
/// error class.
pub struct Corruption {
    pub name: &'static str,
    pub source: String,
    pub label: &'static str,
    pub class: &'static str,
}

fn replace_once(src: &str, from: &str, to: &str) -> String {
    assert_eq!(src.matches(from).count(), 1, "`{from}` must occur exactly once");
    src.replacen(from, to, 1)
}

const SYL_PROOF: &str = "wph wps wi wph wch wi syl.1 wph wps wch wi wi wph wps wi wph wch wi wi
    wps wch wi wph wps wch wi wi syl.2 wps wch wi wph ax-1 ax-mp wph wps wch
    ax-2 ax-mp ax-mp $.";

pub fn corruptions() -> Vec<Corruption> {
    let a1d = |to: &str| replace_once(MINI, A1D_PROOF, to);
    let c = |name, source, label, class| Corruption { name, source, label, class };
    vec![
        c("delete final syl", a1d("wph wps wch wps wi a1d.1 wps wch ax-1"), "a1d", "final-stack-size"),
        c("swap wps and wch", a1d("wph wch wps wps wi a1d.1 wps wch ax-1 syl"), "a1d", "essential-mismatch"),
        c("delete a1d.1", a1d("wph wps wch wps wi wps wch ax-1 syl"), "a1d", "stack-underflow"),
        c(
            "swap syl.1 and syl.2",
            replace_once(
                MINI,
                SYL_PROOF,
                &SYL_PROOF.replace("syl.1", "@").replace("syl.2", "syl.1").replace('@', "syl.2"),
            ),
            "syl",
            "essential-mismatch",
        ),
        c("swap syl premises", a1d("wph wps wch wps wi wps wch ax-1 a1d.1 syl"), "a1d", "essential-mismatch"),
        c("ax-1 replaced by ax-2", a1d("wph wps wch wps wi a1d.1 wps wch ax-2 syl"), "a1d", "floating-mismatch"),
        c("every wch replaced by wph", a1d("wph wps wph wps wi a1d.1 wps wph ax-1 syl"), "a1d", "conclusion-mismatch"),
        c("syl cites itself", replace_once(MINI, "ax-2 ax-mp ax-mp $.", "ax-2 ax-mp syl $."), "syl", "bad-label"),
        c("drop $d x ps", replace_once(DV, "$d x ps $.", ""), "ax5ps", "disjoint"),
        c("drop $d y ph", replace_once(DV, "$d y ph $.", ""), "dvd", "disjoint"),
    ]
}
