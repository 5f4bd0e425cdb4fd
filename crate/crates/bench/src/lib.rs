//! Inputs for the benchmarks.

pub use mmrus_core;

pub const MINI: &str = include_str!("../../core/tests/fixtures/mini.mm");

/// The mini database followed by `n` scoped copies of a1d.
pub fn synthetic_database(n: usize) -> String {
    let mut out = String::from(MINI);
    for k in 0..n {
        out.push_str(&format!(
            "${{ a1d-{k}.1 $e |- ( ph -> ps ) $.\n  a1d-{k} $p |- ( ph -> ( ch -> ps ) ) $=\n    \
             wph wps wch wps wi a1d-{k}.1 wps wch ax-1 syl $. $}}\n"
        ));
    }
    out
}

/// `( ph -> ( ph -> ... ( ph -> ph ) ... ) )` with `depth` arrows.
pub fn nested_implication(depth: usize) -> String {
    let mut s = String::from("ph");
    for _ in 0..depth {
        s = format!("( ph -> {s} )");
    }
    s
}
