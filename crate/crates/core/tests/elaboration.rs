use std::collections::BTreeSet;

use padl_core::elaboration::{insert_async_queues, or_rewrite, Closure, Elaboration, OrPlan, SemanticsRequest};
use padl_core::frontend::{self, ast::Synchronicity, parse_equations};
use padl_core::kernel::{self, Lts};

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn elaborate(src: &str, capacity: u32) -> Elaboration {
    insert_async_queues(&frontend::load(src).unwrap(), capacity).unwrap()
}

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

#[test]
fn server_rewrite_matches_golden() {
    let arch = frontend::load(&fixture("client_server_sync.padl")).unwrap();
    let server = arch.aet_of(arch.aei_index("S").unwrap());
    let plan = OrPlan {
        copies: [("receive_request".to_string(), 2), ("send_response".to_string(), 2)].into(),
        deps: [("send_response".to_string(), "receive_request".to_string())].into(),
    };
    let got = or_rewrite(&server.equations, &plan).unwrap();
    let want = parse_equations(&fixture("golden/server_or_rewrite.padl")).unwrap();
    assert_eq!(got, want);

    let elab = elaborate(&fixture("client_server_sync.padl"), 2);
    let s = elab.aei("S").unwrap();
    assert_eq!(elab.aeis()[s].equations, want);
}

#[test]
fn fresh_names_put_the_sender_first() {
    let elab = elaborate(&fixture("client_server_sync.padl"), 2);
    let names: Vec<&str> = elab.groups().iter().map(|g| g.name.as_str()).collect();
    assert_eq!(
        names,
        vec![
            "C_1.send_request#S.receive_request_1",
            "C_2.send_request#S.receive_request_2",
            "S.send_response_1#C_1.receive_response",
            "S.send_response_2#C_2.receive_response",
        ]
    );
    assert!(elab.queues().is_empty());
}

#[test]
fn async_server_gets_two_output_queues() {
    let elab = elaborate(&fixture("client_server_async.padl"), 2);
    let queues: Vec<&str> = elab.queues().iter().map(|q| q.name.as_str()).collect();
    assert_eq!(queues, vec!["OAQ_1", "OAQ_2"]);
    let names: BTreeSet<String> = elab.groups().iter().map(|g| g.name.clone()).collect();
    for i in 1..=2 {
        assert!(names.contains(&format!("S.send_response_{i}#OAQ_{i}.arrive")));
        assert!(names.contains(&format!("OAQ_{i}.depart#C_{i}.receive_response")));
    }
    for m in elab.aeis() {
        assert!(m.interactions.iter().all(|i| i.synchronicity != Synchronicity::Async));
    }
}

#[test]
fn async_and_interaction_gets_one_queue_per_attachment() {
    let src = "ARCHI_TYPE Fan(void)
      ARCHI_BEHAVIOR
        ARCHI_ELEM_TYPE Src_Type(void)
          BEHAVIOR S(void; void) = emit . S()
          INPUT_INTERACTIONS void
          OUTPUT_INTERACTIONS ASYNC AND emit
        ARCHI_ELEM_TYPE Dst_Type(void)
          BEHAVIOR D(void; void) = take . D()
          INPUT_INTERACTIONS UNI take
          OUTPUT_INTERACTIONS void
      ARCHI_TOPOLOGY
        ARCHI_ELEM_INSTANCES X : Src_Type(); A : Dst_Type(); B : Dst_Type(); C : Dst_Type()
        ARCHI_INTERACTIONS void
        ARCHI_ATTACHMENTS FROM X.emit TO A.take; FROM X.emit TO B.take; FROM X.emit TO C.take
      END";
    let elab = elaborate(src, 1);
    assert_eq!(elab.queues().len(), 3);
    let names: Vec<&str> = elab.groups().iter().map(|g| g.name.as_str()).collect();
    assert!(names.contains(&"X.emit#OAQ_1.arrive#OAQ_2.arrive#OAQ_3.arrive"));
    assert!(names.contains(&"OAQ_3.depart#C.take"));

    // The and-output synchronizes with all three queues at once.
    let x = elab.aei("X").unwrap();
    let all = elab.all_aeis();
    let sem = elab.aei_semantics(x, &all, Closure::Open, &all).unwrap();
    // Each queue holds at most one message: after one emission all are full.
    assert_eq!(sem.lts.num_states(), 8);
}

#[test]
fn name_sets_of_cruise_control() {
    let elab = elaborate(&fixture("cruise_control.padl"), 2);
    let (s, p) = (elab.aei("S").unwrap(), elab.aei("P").unwrap());
    let e = elab.exception_names(s, &[p].into());
    let want: BTreeSet<String> =
        ["engine_on", "engine_off", "accelerator", "brake", "on", "off", "resume"]
            .iter()
            .map(|x| format!("P.signal_{x}_exception"))
            .collect();
    assert_eq!(e, want);
    assert!(elab.queue_names(s, &[p].into()).is_empty());

    let ns = elab.name_sets(s, &elab.all_aeis());
    assert!(ns.sync.contains("S.turn_engine_on#C.turned_engine_on#D.turned_engine_on"));
    assert!(ns.originally_async.is_empty());
}

#[test]
fn partially_closed_server_sees_only_composite_names() {
    let elab = elaborate(&fixture("client_server_sync.padl"), 2);
    let req = SemanticsRequest {
        subject: vec!["S".into()],
        context: elab.aei_names(),
        closure: Closure::Partial,
        buffers_for: vec![],
        partial_members: vec![],
    };
    let sem = elab.semantics(&req).unwrap();
    assert_eq!(
        sem.lts.action_names(),
        set(&[
            "C_1.send_request#S.receive_request_1",
            "C_2.send_request#S.receive_request_2",
            "S.send_response_1#C_1.receive_response",
            "S.send_response_2#C_2.receive_response",
        ])
    );
}

#[test]
fn variants_coincide_without_asynchrony() {
    let elab = elaborate(&fixture("cruise_control.padl"), 2);
    let all = elab.all_aeis();
    for aei in 0..elab.aeis().len() {
        let wob = elab.aei_semantics(aei, &all, Closure::Partial, &BTreeSet::new()).unwrap();
        let buf = elab.aei_semantics(aei, &all, Closure::Partial, &all).unwrap();
        let tc = elab.aei_semantics(aei, &all, Closure::Total, &BTreeSet::new()).unwrap();
        assert!(wob.lts.same_structure(&buf.lts));
        assert!(wob.lts.same_structure(&tc.lts));
        let single = elab.composite_semantics(&[aei], &all, Closure::Partial, &BTreeSet::new(), &BTreeSet::new()).unwrap();
        assert!(single.lts.same_structure(&wob.lts));
    }
}

#[test]
fn totally_closed_keeps_only_attached_names() {
    let elab = elaborate(&fixture("client_server_async.padl"), 2);
    let all = elab.all_aeis();
    for aei in 0..elab.aeis().len() {
        let ns = elab.name_sets(aei, &all);
        let tc = elab.aei_semantics(aei, &all, Closure::Total, &all).unwrap();
        assert!(tc.lts.action_names().is_subset(&ns.sync), "{}", ns.aei);
    }
}

#[test]
fn smaller_queues_are_prefixes_of_larger_ones() {
    let src = fixture("client_server_async.padl");
    let lts: Vec<Lts> = (1..=4).map(|c| elaborate(&src, c).queue_behavior(0).unwrap()).collect();
    for w in lts.windows(2) {
        let (small, big) = (&w[0], &w[1]);
        assert!(small.num_states() < big.num_states());
        for s in small.states() {
            for t in small.transitions(s) {
                let name = small.label_name(t.label());
                assert!(big
                    .transitions(s)
                    .iter()
                    .any(|u| big.label_name(u.label()) == name && u.target() == t.target()));
            }
        }
    }
    assert!(lts[0].is_marked(1) && !lts[0].is_marked(0));
}

#[test]
fn server_with_buffers_composes_with_its_queues() {
    let elab = elaborate(&fixture("client_server_async.padl"), 1);
    let s = elab.aei("S").unwrap();
    let all = elab.all_aeis();
    let sem = elab.aei_semantics(s, &all, Closure::Partial, &all).unwrap();
    let names = sem.lts.action_names();
    assert!(names.contains("S.send_response_1#OAQ_1.arrive"));
    assert!(names.contains("OAQ_2.depart#C_2.receive_response"));
    assert!(kernel::find_deadlocks(&sem.lts, kernel::DeadlockNotion::Weak).is_empty());
}

#[test]
fn zero_capacity_is_rejected() {
    let arch = frontend::load(&fixture("client_server_async.padl")).unwrap();
    assert!(insert_async_queues(&arch, 0).is_err());
}
