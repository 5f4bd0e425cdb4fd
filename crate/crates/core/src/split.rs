//! Splitting a Metamath source along its outline comments.
//!
//! Outline comments are comments whose first non-blank line is a banner of
//! alternating characters: `#*#*#` opens a part (level 1), `=-=-=` a section
//! (level 2) and `-.-.-` a subsection (level 3). The line after the banner is
//! the title. Other decorations are ordinary comments.

use std::fs;
use std::io;
use std::ops::Range;
use std::path::{Path, PathBuf};

pub const INDEX_FILE: &str = "index.txt";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Banner {
    pub level: usize,
    pub title: String,
    /// Byte offset of the start of the line holding `$(`.
    pub offset: usize,
}

fn banner_level(line: &str) -> Option<usize> {
    let line = line.trim();
    let level = match line.get(..2)? {
        "#*" => 1,
        "=-" => 2,
        "-." => 3,
        _ => return None,
    };
    let unit = &line.as_bytes()[..2];
    let ok = line.len() >= 6 && line.as_bytes().iter().enumerate().all(|(i, b)| *b == unit[i % 2]);
    ok.then_some(level)
}

fn outline_of(body: &str) -> Option<(usize, String)> {
    let mut lines = body.lines().map(str::trim).filter(|l| !l.is_empty());
    let level = banner_level(lines.next()?)?;
    let title = lines.next().filter(|l| banner_level(l).is_none()).unwrap_or("").to_string();
    Some((level, title))
}

/// Whitespace-delimited tokens with their byte offsets.
fn tokens(src: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = src.char_indices().peekable();
    std::iter::from_fn(move || {
        while rest.next_if(|(_, c)| c.is_whitespace()).is_some() {}
        let (start, _) = *rest.peek()?;
        let mut end = start;
        while let Some((i, c)) = rest.next_if(|(_, c)| !c.is_whitespace()) {
            end = i + c.len_utf8();
        }
        Some((start, &src[start..end]))
    })
}

/// Every outline comment in `src`, in order. An unterminated comment ends
/// the scan.
pub fn find_banners(src: &str) -> Vec<Banner> {
    let mut out = Vec::new();
    let mut toks = tokens(src);
    while let Some((at, tok)) = toks.next() {
        if tok != "$(" {
            continue;
        }
        let Some((end, _)) = toks.by_ref().find(|(_, t)| *t == "$)") else { break };
        if let Some((level, title)) = outline_of(&src[at + 2..end]) {
            let offset = src[..at].rfind('\n').map_or(0, |i| i + 1);
            out.push(Banner { level, title, offset });
        }
    }
    out
}

/// One output file: its path relative to the output directory and the
/// slice of the input it holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part {
    pub path: PathBuf,
    pub range: Range<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SplitPlan {
    /// In input order; the ranges tile the input.
    pub parts: Vec<Part>,
    pub warnings: Vec<String>,
}

fn slug(title: &str) -> String {
    let mut s = String::new();
    for c in title.chars() {
        if c.is_ascii_alphanumeric() {
            s.push(c.to_ascii_lowercase());
        } else if !s.ends_with('-') {
            s.push('-');
        }
    }
    let s: String = s.trim_matches('-').chars().take(40).collect();
    let s = s.trim_end_matches('-');
    if s.is_empty() {
        "untitled".into()
    } else {
        s.into()
    }
}

/// Plans a split on banners of level `depth` or less. Each banner starts a
/// file named `NN-slug.mm`; banners nested under it go into the directory
/// `NN-slug/`. Text before the first banner goes to `00-preamble.mm`.
pub fn plan_split(src: &str, depth: usize) -> SplitPlan {
    let banners: Vec<Banner> = find_banners(src).into_iter().filter(|b| b.level <= depth).collect();
    let mut plan = SplitPlan::default();
    if banners.is_empty() {
        plan.warnings.push(format!("no outline comments up to level {depth}; writing a single part"));
    }
    let first = banners.first().map_or(src.len(), |b| b.offset);
    if first > 0 || banners.is_empty() {
        plan.parts.push(Part { path: "00-preamble.mm".into(), range: 0..first });
    }
    // (level, directory, children so far) of the open banners
    let mut open: Vec<(usize, PathBuf)> = Vec::new();
    let mut counts: Vec<usize> = vec![0];
    for (i, b) in banners.iter().enumerate() {
        while open.last().is_some_and(|(l, _)| *l >= b.level) {
            open.pop();
            counts.pop();
        }
        let n = counts.last_mut().unwrap();
        *n += 1;
        let name = format!("{:02}-{}", n, slug(&b.title));
        let dir = open.last().map_or_else(PathBuf::new, |(_, d)| d.clone());
        let end = banners.get(i + 1).map_or(src.len(), |next| next.offset);
        plan.parts.push(Part { path: dir.join(format!("{name}.mm")), range: b.offset..end });
        open.push((b.level, dir.join(name)));
        counts.push(0);
    }
    plan
}

fn index_text(plan: &SplitPlan) -> String {
    plan.parts.iter().map(|p| format!("{}\n", p.path.to_string_lossy().replace('\\', "/"))).collect()
}

/// Writes the parts and `index.txt` (one relative path per line, in order)
/// under `dir`.
pub fn write_split(src: &str, plan: &SplitPlan, dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for p in &plan.parts {
        let path = dir.join(&p.path);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, &src[p.range.clone()])?;
    }
    fs::write(dir.join(INDEX_FILE), index_text(plan))
}

/// Concatenates the parts listed in `dir/index.txt`.
pub fn join_split(dir: &Path) -> io::Result<String> {
    let index = fs::read_to_string(dir.join(INDEX_FILE))?;
    let mut out = String::new();
    for line in index.lines().filter(|l| !l.is_empty()) {
        out.push_str(&fs::read_to_string(dir.join(line))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const OUTLINE: &str = include_str!("../tests/fixtures/outline.mm");

    fn paths(plan: &SplitPlan) -> Vec<String> {
        plan.parts.iter().map(|p| p.path.to_string_lossy().into_owned()).collect()
    }

    #[test]
    fn banner_lines() {
        assert_eq!(banner_level("#*#*#*#*"), Some(1));
        assert_eq!(banner_level("  =-=-=-=-=  "), Some(2));
        assert_eq!(banner_level("-.-.-.-."), Some(3));
        assert_eq!(banner_level("*-*-*-*-"), None);
        assert_eq!(banner_level("#*#*"), None);
        assert_eq!(banner_level("#*#*#*x*"), None);
    }

    #[test]
    fn finds_outline_comments_only() {
        let b = find_banners(OUTLINE);
        let got: Vec<(usize, &str)> = b.iter().map(|b| (b.level, b.title.as_str())).collect();
        assert_eq!(
            got,
            [
                (1, "Part one: syntax"),
                (2, "Section: implication"),
                (3, "Subsection: the rule"),
                (3, "Subsection: nothing else"),
                (1, "Part two: axioms"),
                (2, "Section: Hilbert axioms"),
                (3, "Subsection: modus ponens"),
                (2, "Section: a theorem"),
            ]
        );
        assert!(b.iter().all(|b| OUTLINE[b.offset..].starts_with("$(")));
    }

    #[test]
    fn banner_text_inside_a_statement_is_not_a_comment() {
        assert!(find_banners("x $a |- #*#*#*#* $.").is_empty());
        assert!(find_banners("$( unterminated\n#*#*#*#*\n").is_empty());
    }

    #[test]
    fn plan_mirrors_the_outline() {
        assert_eq!(
            paths(&plan_split(OUTLINE, 1)),
            ["00-preamble.mm", "01-part-one-syntax.mm", "02-part-two-axioms.mm"]
        );
        assert_eq!(
            paths(&plan_split(OUTLINE, 3)),
            [
                "00-preamble.mm",
                "01-part-one-syntax.mm",
                "01-part-one-syntax/01-section-implication.mm",
                "01-part-one-syntax/01-section-implication/01-subsection-the-rule.mm",
                "01-part-one-syntax/01-section-implication/02-subsection-nothing-else.mm",
                "02-part-two-axioms.mm",
                "02-part-two-axioms/01-section-hilbert-axioms.mm",
                "02-part-two-axioms/01-section-hilbert-axioms/01-subsection-modus-ponens.mm",
                "02-part-two-axioms/02-section-a-theorem.mm",
            ]
        );
    }

    #[test]
    fn parts_tile_the_input() {
        for depth in 0..=4 {
            let plan = plan_split(OUTLINE, depth);
            let joined: String = plan.parts.iter().map(|p| &OUTLINE[p.range.clone()]).collect();
            assert_eq!(joined, OUTLINE);
        }
    }

    #[test]
    fn no_banners_gives_one_part_and_a_warning() {
        let plan = plan_split("$c x $.\n", 3);
        assert_eq!(plan.parts, [Part { path: "00-preamble.mm".into(), range: 0..8 }]);
        assert_eq!(plan.warnings.len(), 1);
        assert_eq!(plan_split("", 3).parts.len(), 1);
    }

    #[test]
    fn skipped_levels_nest_under_the_nearest_banner() {
        let src = "$(\n-.-.-.-.\n  lone\n$)\n$(\n#*#*#*#*\n  top\n$)\n$(\n-.-.-.-.\n  deep\n$)\n";
        assert_eq!(paths(&plan_split(src, 3)), ["01-lone.mm", "02-top.mm", "02-top/01-deep.mm"]);
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("  Part 1: ZF set theory!  "), "part-1-zf-set-theory");
        assert_eq!(slug("***"), "untitled");
        assert_eq!(slug(&"a".repeat(50)).len(), 40);
    }
}
