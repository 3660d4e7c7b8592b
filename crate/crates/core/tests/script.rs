use framechat_core::engine::{Engine, EngineConfig};
use framechat_core::script::{
    parse_script_set, render_script_set, validate, ContextScript, DiagnosticCode, PatternElement, PatternExpr,
    ResponseBody, ResponseExpr, ResponseItem, Rule, ScriptSet, Severity, Span,
};

const SUBJECTS: &str = include_str!("fixtures/subjects.fscript");
const RULE_ORDER: &str = include_str!("fixtures/rule_order.fscript");

fn lit(s: &str) -> PatternElement {
    PatternElement::Literal(s.into())
}

#[test]
fn subjects_source_parses() {
    let set = parse_script_set(SUBJECTS, "subjects").unwrap();
    assert_eq!(set.contexts.len(), 2);
    let first = &set.contexts[0];
    assert_eq!(first.name, "mon_hoc_tien_quyet");
    assert_eq!(
        first.trigger.as_ref().unwrap().elements,
        [PatternElement::Wildcard, lit("môn"), lit("học"), lit("tiên"), lit("quyết"), PatternElement::Wildcard]
    );
    assert_eq!(first.rules.len(), 3);
    assert!(first.rules.iter().enumerate().all(|(i, r)| r.ordinal == i));
    assert_eq!(set.contexts[1].name, "mon_hoc_dieu_kien");
    assert_eq!(set.default_context, "mon_hoc_tien_quyet");
}

#[test]
fn rule_order_source_parses_clean() {
    let set = parse_script_set(RULE_ORDER, "rule_order").unwrap();
    let names: Vec<_> = set.context_names().collect();
    assert_eq!(names, ["mon_hoc", "quy_che_dao_tao"]);
    assert_eq!(set.contexts[0].rules.len(), 3);
    let qcdt = &set.contexts[1];
    assert_eq!(qcdt.rules.len(), 3);
    assert!(qcdt.trigger.is_none() && qcdt.activatable_by_any_input());
    for rule in &qcdt.rules {
        let body = &rule.response.alternatives[0];
        assert!(matches!(body.items.as_slice(), [ResponseItem::Action(_)]));
    }
    // Targets outside this file are unknown, but nothing is misordered.
    let diags = validate(&set);
    assert!(diags.iter().all(|d| d.code != DiagnosticCode::RuleOrdering), "{diags:?}");
}

#[test]
fn moving_the_general_rule_first_warns_once() {
    let mut set = parse_script_set(RULE_ORDER, "rule_order").unwrap();
    let qcdt = &mut set.contexts[1];
    let general = qcdt.rules.pop().unwrap();
    qcdt.rules.insert(0, general);
    for (i, r) in qcdt.rules.iter_mut().enumerate() {
        r.ordinal = i;
    }
    let warnings: Vec<_> = validate(&set).into_iter().filter(|d| d.code == DiagnosticCode::RuleOrdering).collect();
    assert_eq!(warnings.len(), 1);
    assert_eq!(warnings[0].severity, Severity::Warning);
    assert!(warnings[0].message.contains("rule 0") && warnings[0].message.contains("rule 1"), "{}", warnings[0].message);
}

#[test]
fn fixtures_round_trip() {
    for (src, name) in [(SUBJECTS, "subjects"), (RULE_ORDER, "rule_order")] {
        let set = parse_script_set(src, name).unwrap();
        assert_eq!(parse_script_set(&render_script_set(&set), name).unwrap(), set);
    }
}

#[test]
fn empty_source_is_a_single_error() {
    let diags = parse_script_set("", "empty").unwrap_err();
    assert_eq!(diags.len(), 1);
    assert_eq!(diags[0].severity, Severity::Error);
}

#[test]
fn dangling_goto() {
    let set = parse_script_set("a :: * ==> [ #goto(khong_ton_tai) ] ;;", "t").unwrap();
    let diags = validate(&set);
    assert_eq!(diags.len(), 1);
    assert_eq!(diags[0].code, DiagnosticCode::UnknownGotoTarget);
}

#[test]
fn smallest_set_renders_minimally() {
    let set = ScriptSet {
        contexts: vec![ContextScript {
            name: "a".into(),
            trigger: None,
            rules: vec![Rule {
                pattern: PatternExpr::new(vec![PatternElement::Wildcard]),
                response: ResponseExpr { alternatives: vec![ResponseBody::new(vec![ResponseItem::Text("x".into())])] },
                ordinal: 0,
                span: Span::default(),
            }],
            span: Span::default(),
        }],
        default_context: "a".into(),
        source_name: "t".into(),
    };
    assert_eq!(render_script_set(&set), "a ::\n* ==> [ x ]\n;;\n");
}

#[test]
fn collects_errors_across_contexts() {
    let src = "a :: * x [ y ] ;;\nb :: * ==> [ #goto(c, 1, 2) ] ;;\nc :: {x | } ==> [ z ] ;;\nd :: ok ==> [ fine ] ;;";
    let codes: Vec<_> = parse_script_set(src, "t").unwrap_err().into_iter().map(|d| d.code).collect();
    assert_eq!(codes, [DiagnosticCode::MissingArrow, DiagnosticCode::BadGotoArity, DiagnosticCode::EmptyAlternation]);
}

#[test]
fn subjects_dialogue_activates_by_trigger() {
    let mut set = parse_script_set(SUBJECTS, "subjects").unwrap();
    set.contexts.push(parse_script_set("khoa_luan :: never ==> [ k ] ;;", "k").unwrap().contexts.remove(0));
    set.default_context = "khoa_luan".into();
    let engine = Engine::new(set, EngineConfig::default()).unwrap();
    let mut state = engine.new_session();
    let r = engine.process_turn(&mut state, "môn học tiên quyết là gì?");
    assert!(r.via_trigger);
    assert_eq!(r.transitions, ["mon_hoc_tien_quyet"]);
    assert!(r.response_text.starts_with("Môn học tiên quyết của một môn học"));
    let r = engine.process_turn(&mut state, "Có. Tôi muốn biết.");
    assert!(!r.via_trigger);
    assert_eq!(r.transitions, ["mon_hoc_dieu_kien"]);
}
