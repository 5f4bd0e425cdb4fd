use super::*;
use crate::mm::{parse_mm_source, AssertionKind};
use crate::rus::{print_item, RusItem};
use crate::symbol::Expression;

const MINI: &str = include_str!("../../tests/fixtures/mini.mm");
const DV: &str = include_str!("../../tests/fixtures/dv.mm");
const A1D: &str = include_str!("../../tests/fixtures/a1d.rus");

fn db(src: &str) -> Database {
    parse_mm_source(src).unwrap()
}

fn rus(src: &str) -> RusTranslation {
    mm_to_rus(&db(src), &TranslateOptions::default()).unwrap()
}

fn printed(t: &Theory, name: &str) -> String {
    print_item(t.item(t.index_of(name).unwrap()))
}

/// A theorem's header and proof blocks as they appear in `text`.
fn theorem_text(text: &str, name: &str) -> String {
    let from = text.find(&format!("theorem {name} (")).unwrap();
    let proof = from + text[from..].find(&format!("proof of {name} {{")).unwrap();
    let len = text[proof..].find("\n}\n").unwrap() + 3;
    text[from..proof + len].to_string()
}

#[test]
fn smm_keeps_assertions_and_conclusions() {
    let d = db(MINI);
    let smm = mm_to_smm(&d).unwrap();
    assert_eq!(smm.len(), d.assertions().len());
    for (a, b) in d.assertions().iter().zip(&smm.assertions) {
        assert_eq!(a.label, b.label);
        assert_eq!(a.frame.conclusion, b.frame.conclusion);
    }
    assert!(check_smm(&smm).is_ok());
    assert!(mm_to_smm(&db("")).unwrap().is_empty());
}

#[test]
fn shared_essential_is_copied_into_each_frame() {
    let src = "$c |- wff ( ) -> $. $v ph ps $. wph $f wff ph $. wps $f wff ps $.
        wi $a wff ( ph -> ps ) $.
        ${ h $e |- ph $.
           one $p |- ph $= h $.
           two $p |- ph $= h $. $}";
    let smm = mm_to_smm(&db(src)).unwrap();
    let expected = vec![
        crate::mm::Hypothesis::floating("wph", "wff".into(), "ph".into()),
        crate::mm::Hypothesis::essential("h", Expression::parse("|- ph")),
    ];
    assert_eq!(smm.get("one").unwrap().frame.hyps, expected);
    assert_eq!(smm.get("two").unwrap().frame.hyps, expected);
    let mm = smm_to_mm_text(&smm).unwrap();
    assert_eq!(mm.matches("h $e |- ph $.").count(), 2, "{mm}");
}

#[test]
fn dummies_travel_with_their_assertion() {
    let smm = mm_to_smm(&db(DV)).unwrap();
    let dvd = smm.get("dvd").unwrap();
    assert_eq!(dvd.dummies.iter().map(|h| h.label.as_str()).collect::<Vec<_>>(), ["vy"]);
    assert!(dvd.extra_disjoint.contains(&"y".into(), &"ph".into()));
    assert!(dvd.frame.disjoint.is_empty());
    let ax5ps = smm.get("ax5ps").unwrap();
    assert!(ax5ps.frame.disjoint.contains(&"x".into(), &"ps".into()));
    assert!(ax5ps.extra_disjoint.is_empty());
}

#[test]
fn a1d_strips_to_the_two_step_listing() {
    let t = rus(MINI).theory;
    assert_eq!(printed(&t, "a1d"), theorem_text(A1D, "a1d"));
}

#[test]
fn syl_strips_to_hand_derived_steps() {
    let t = rus(MINI).theory;
    assert_eq!(printed(&t, "syl"), theorem_text(A1D, "syl"));
}

#[test]
fn stripped_proofs_have_no_syntactic_steps() {
    for src in [MINI, DV] {
        let t = rus(src).theory;
        for (_, th) in t.theorems() {
            for s in &th.proof.as_ref().unwrap().steps {
                assert!(!t.grammar().is_syntactic(&s.stmt.marker_symbol()), "{}", s.stmt);
            }
        }
    }
}

#[test]
fn constant_assertion_without_variables_is_one_step() {
    let src = "$c |- T -. wff $. $v ph $. wph $f wff ph $. wt $a wff T $. wn $a wff -. ph $.
        tru $a |- T $. tt $p |- T $= tru $.";
    let t = rus(src).theory;
    let RusItem::Theorem(th) = t.item(t.index_of("tt").unwrap()) else { panic!() };
    let p = th.proof.as_ref().unwrap();
    assert_eq!(p.steps.len(), 1);
    assert!(p.steps[0].premises.is_empty());
}

#[test]
fn listings_print_as_in_the_source_language() {
    let t = rus(MINI).theory;
    assert_eq!(
        printed(&t, "ax-1"),
        "axiom ax-1 (ph : wff, ps : wff)  {\n    prop 1 : wff = |- ( ph -> ( ps -> ph ) ) ;;\n}\n"
    );
    assert_eq!(printed(&t, "wi"), "rule wi (ph : wff, ps : wff) {\n    term : wff = # ( ph -> ps ) ;;\n}\n");
    assert_eq!(printed(&t, "wn"), "rule wn (ph : wff) {\n    term : wff = # -. ph ;;\n}\n");
    assert_eq!(
        printed(&t, "df-or"),
        "definition df-or (ph : wff, ps : wff)  {
    defiendum : wff = # ( ph \\/ ps ) ;;
    definiens : wff = # ( -. ph -> ps ) ;;
    -----------------------
    prop : wff = |- ( defiendum <-> definiens ) ;;
}
"
    );
    assert!(matches!(t.item(t.index_of("df-or").unwrap()), RusItem::Definition(_)));
}

#[test]
fn elaborating_a1d_gives_the_original_proof() {
    let theory = parse_rus_source(A1D).unwrap();
    let smm = rus_to_smm(&theory, false).unwrap();
    let a1d = smm.get("a1d").unwrap();
    assert_eq!(a1d.proof.as_ref().unwrap().join(" "), "wph wps wch wps wi a1d.1 wps wch ax-1 syl");
    let i = smm.position("a1d").unwrap();
    assert_eq!(replay_smm(&smm, i).unwrap().conclusion(), &Expression::parse("|- ( ph -> ( ch -> ps ) )"));
}

#[test]
fn single_step_with_identity_bindings() {
    let src = "$c |- wff ( ) -> $. $v ph ps $. wph $f wff ph $. wps $f wff ps $.
        wi $a wff ( ph -> ps ) $.
        ax-1 $a |- ( ph -> ( ps -> ph ) ) $.
        id1 $p |- ( ph -> ( ps -> ph ) ) $= wph wps ax-1 $.";
    let t = rus(src).theory;
    let smm = rus_to_smm(&t, false).unwrap();
    assert_eq!(smm.get("id1").unwrap().proof.as_ref().unwrap().join(" "), "wph wps ax-1");
}

#[test]
fn russell_a1d_becomes_a_scoped_block() {
    let theory = parse_rus_source(A1D).unwrap();
    let out = rus_to_mm(&theory, &TranslateOptions::default()).unwrap();
    assert!(check_database(&out, CheckOptions::default()).is_ok());
    let a = out.assertion_by_label("a1d").unwrap();
    assert_eq!(a.kind, AssertionKind::Provable);
    let ess: Vec<_> = a.frame.essentials().map(|h| (h.label.as_str(), h.expr.to_string())).collect();
    assert_eq!(ess, [("a1d.1", "|- ( ph -> ps )".to_string())]);
    assert!(rus_to_mm(&Theory::default(), &TranslateOptions::default()).unwrap().assertions().is_empty());
}

#[test]
fn round_trip_mini_and_dv() {
    for src in [MINI, DV] {
        let report = round_trip(&db(src), &TranslateOptions::default()).unwrap();
        assert!(report.diff.is_empty(), "{:?}", report.diff);
        assert!(report.warnings.is_empty(), "{:?}", report.warnings);
    }
}

#[test]
fn round_trip_in_parallel_matches_sequential() {
    let d = db(MINI);
    let seq = round_trip(&d, &TranslateOptions::default()).unwrap();
    let par = round_trip(&d, &TranslateOptions { parallel: true, ..TranslateOptions::default() }).unwrap();
    assert_eq!(seq.russell, par.russell);
    assert_eq!(seq.mm, par.mm);
}

#[test]
fn nonconforming_df_stays_an_axiom() {
    // the definiens mentions a variable that is not in the defiendum
    let src = MINI
        .replace(
            "df-or $a |- ( ( ph \\/ ps ) <-> ( -. ph -> ps ) ) $.",
            "df-or $a |- ( ( ph \\/ ps ) <-> ( -. ph -> ch ) ) $.",
        )
        .replace("orunf $p", "$( $) orunf-gone $a");
    let src = &src[..src.find("orunf-gone").unwrap()];
    let out = rus(src);
    assert!(matches!(out.theory.item(out.theory.index_of("df-or").unwrap()), RusItem::Axiom(_)));
    assert_eq!(out.warnings.len(), 1);
    assert!(out.warnings[0].contains("C3"), "{}", out.warnings[0]);
}

#[test]
fn syntactic_theorems_are_skipped_with_a_warning() {
    let src = "$c wff ( ) -> $. $v ph ps $. wph $f wff ph $. wps $f wff ps $.
        wi $a wff ( ph -> ps ) $.
        wii $p wff ( ph -> ( ph -> ps ) ) $= wph wph wps wi wi $.";
    let d = db(src);
    let out = mm_to_rus(&d, &TranslateOptions::default()).unwrap();
    assert_eq!(out.warnings.len(), 1);
    assert!(out.theory.index_of("wii").is_none());
    let back = rus_to_mm(&out.theory, &TranslateOptions::default()).unwrap();
    assert_eq!(structural_diff(&d, &back), vec![DiffEntry { label: "wii".into(), kind: DiffKind::Missing }]);
}

#[test]
fn names_are_mangled_into_labels() {
    let src = A1D.replace("a1d", "a1d'");
    let theory = parse_rus_source(&src).unwrap();
    let smm = rus_to_smm(&theory, false).unwrap();
    assert_eq!(smm.renamed, vec![("a1d'".to_string(), "a1d_".to_string())]);
    assert!(check_smm(&smm).is_ok());
    let clash = format!("{A1D}\naxiom a1d_ (ph : wff) {{ prop 1 : wff = |- ph ;; }}")
        .replace("a1d (", "a1d' (")
        .replace("of a1d", "of a1d'");
    let theory = parse_rus_source(&clash).unwrap();
    assert!(matches!(rus_to_smm(&theory, false), Err(TranslateError::NameCollision { .. })));
}

#[test]
fn failing_proofs_do_not_translate() {
    let src = MINI.replace("wps wch ax-1 syl $.", "wps wch ax-2 syl $.");
    let err = mm_to_rus(&db(&src), &TranslateOptions::default()).unwrap_err();
    assert!(matches!(err, TranslateError::Stage { stage: "SMM", .. }), "{err}");
}

#[test]
fn diff_reports_changed_statements() {
    let a = db(MINI);
    let b = db(&MINI.replace(
        "ax-3 $a |- ( ( -. ph -> -. ps ) -> ( ps -> ph ) ) $.",
        "ax-3 $a |- ( ( -. ph -> -. ps ) -> ( ph -> ps ) ) $.",
    ));
    let diff = structural_diff(&a, &b);
    assert_eq!(diff.len(), 1);
    assert_eq!(diff[0].label, "ax-3");
    assert!(matches!(diff[0].kind, DiffKind::Conclusion { .. }));
    assert!(structural_diff(&a, &a).is_empty());
}

#[test]
fn merged_variable_order_respects_every_list() {
    let s = |t: &str| crate::symbol::Symbol::new(t);
    let (ph, ps, x, y) = (s("ph"), s("ps"), s("x"), s("y"));
    let order = smm::merge_orders(vec![vec![&ps, &x], vec![&ph, &ps], vec![&y], vec![&ph, &y, &x]]);
    assert_eq!(order, vec![ph.clone(), ps.clone(), y.clone(), x.clone()]);
}
