mod common;

use std::time::Instant;

use common::props;
use common::{from_edges, oracle_holds};
use padl_core::equivalence::{check, minimize, saturate, weak_bisim_upto_relabeling, Formula, Mode};
use padl_core::kernel::Lts;

const CASES: usize = 1000;

fn lts(n: usize, es: &[(u32, &str, u32)]) -> Lts {
    let es: Vec<_> = es.iter().map(|(s, a, t)| (*s, a.to_string(), *t)).collect();
    from_edges(n, 0, &es)
}

fn assert_mixed(name: &str, t: props::Tally) {
    assert_eq!(t.total(), CASES, "{name}");
    assert!(t.equivalent > 0 && t.distinct > 0, "{name} saw only one outcome: {t:?}");
}

#[test]
fn weak_verdicts_match_the_oracle() {
    let t = props::oracle_agreement(11, CASES, Mode::Weak).unwrap_or_else(|e| panic!("{e}"));
    assert_mixed("weak", t);
}

#[test]
fn strong_verdicts_match_the_oracle() {
    let t = props::oracle_agreement(12, CASES, Mode::Strong).unwrap_or_else(|e| panic!("{e}"));
    assert_mixed("strong", t);
}

#[test]
fn bisimilarity_is_an_equivalence() {
    let t = props::equivalence_laws(13, CASES).unwrap_or_else(|e| panic!("{e}"));
    assert_mixed("laws", t);
}

#[test]
fn tau_after_a_prefix_is_absorbed() {
    let t = props::tau_law(14, CASES).unwrap_or_else(|e| panic!("{e}"));
    assert!(t.distinct > 0, "the strong check never told a.tau.P from a.P");
}

#[test]
fn weak_equals_strong_on_saturations() {
    let t = props::saturation(15, CASES).unwrap_or_else(|e| panic!("{e}"));
    assert_mixed("saturation", t);
}

#[test]
fn operators_preserve_weak_bisimilarity() {
    let t = props::congruence(16, CASES).unwrap_or_else(|e| panic!("{e}"));
    assert_eq!(t.total(), CASES);
}

#[test]
fn minimization_is_sound_minimal_and_idempotent() {
    let t = props::minimization(17, CASES).unwrap_or_else(|e| panic!("{e}"));
    assert!(t.equivalent > 0, "no random system ever shrank");
}

#[test]
fn whole_suite_is_fast() {
    let start = Instant::now();
    props::all(100, CASES).unwrap_or_else(|e| panic!("{e}"));
    assert!(start.elapsed().as_secs() < 120, "took {:?}", start.elapsed());
}

#[test]
fn different_first_actions() {
    let a = lts(2, &[(0, "a", 1)]);
    let b = lts(2, &[(0, "b", 1)]);
    let v = check(&a, &b, Mode::Weak);
    let f = v.formula().expect("distinct");
    assert_eq!(f.to_string(), "<<a>>tt");
    assert!(oracle_holds(f, &a, 0) && !oracle_holds(f, &b, 0));
    let v = check(&b, &a, Mode::Strong);
    assert_eq!(v.formula().unwrap().to_string(), "<b>tt");
}

#[test]
fn saturating_a_tau_then_a() {
    // 0 -tau-> 1 -a-> 2
    let s = saturate(&lts(3, &[(0, "tau", 1), (1, "a", 2)]));
    let mut got: Vec<(u32, String, u32)> = common::edges(&s);
    got.sort();
    let want: Vec<(u32, String, u32)> = [
        (0, "a", 2),
        (0, "tau", 0),
        (0, "tau", 1),
        (1, "a", 2),
        (1, "tau", 1),
        (2, "tau", 2),
    ]
    .iter()
    .map(|(s, a, t)| (*s, a.to_string(), *t))
    .collect();
    assert_eq!(got, want);
}

#[test]
fn tau_tau_a_minimizes_to_two_states() {
    let l = lts(4, &[(0, "tau", 1), (1, "tau", 2), (2, "a", 3)]);
    let m = minimize(&l, Mode::Weak);
    assert_eq!(m.num_states(), 2);
    assert!(check(&l, &m, Mode::Weak).is_equivalent());
    assert_eq!(minimize(&l, Mode::Strong).num_states(), 4);
}

#[test]
fn choice_is_not_a_congruence_for_tau() {
    // tau.a + b versus a + b: a classic weakly distinct pair.
    let l = lts(4, &[(0, "tau", 1), (1, "a", 2), (0, "b", 3)]);
    let r = lts(3, &[(0, "a", 1), (0, "b", 2)]);
    let v = check(&l, &r, Mode::Weak);
    let f = v.formula().expect("distinct");
    assert!(oracle_holds(f, &l, 0) && !oracle_holds(f, &r, 0), "{f}");
    assert!(matches!(f, Formula::Weak(..) | Formula::Not(_) | Formula::And(_)));
}

#[test]
fn relabeling_applies_to_the_left() {
    let l = lts(2, &[(0, "x", 1)]);
    let r = lts(2, &[(0, "y", 1)]);
    let map = [("x".to_string(), "y".to_string())].into_iter().collect();
    assert!(weak_bisim_upto_relabeling(&l, &r, &map).unwrap().is_equivalent());
    assert!(!weak_bisim_upto_relabeling(&r, &l, &map).unwrap().is_equivalent());
}

#[test]
fn relation_witness_is_a_weak_bisimulation() {
    let l = lts(4, &[(0, "tau", 1), (1, "a", 2), (2, "tau", 3), (3, "b", 0)]);
    let r = lts(2, &[(0, "a", 1), (1, "b", 0)]);
    match check(&l, &r, Mode::Weak) {
        padl_core::equivalence::Verdict::Equivalent { relation } => {
            assert!(relation.contains(&(0, 0)));
            for (s, t) in relation {
                let mut ls = l.clone();
                ls.set_initial(s);
                let mut rs = r.clone();
                rs.set_initial(t);
                assert!(common::oracle_bisimilar(&ls, &rs, true), "{s} {t}");
            }
        }
        v => panic!("{v:?}"),
    }
}
