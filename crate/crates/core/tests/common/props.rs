//! Seeded property checks over random transition systems. Each returns the
//! number of equivalent and distinct pairs it saw, or the first
//! counterexample.

use padl_core::equivalence::{check, minimize, saturate, Mode, Verdict};
use padl_core::kernel::{hide, parallel, relabel, write_aut, HideMode, Lts};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

pub const MAX_STATES: usize = 8;

#[derive(Debug, Default, Clone, Copy)]
pub struct Tally {
    pub equivalent: usize,
    pub distinct: usize,
}

impl Tally {
    pub fn total(&self) -> usize {
        self.equivalent + self.distinct
    }

    fn count(&mut self, eq: bool) {
        if eq {
            self.equivalent += 1;
        } else {
            self.distinct += 1;
        }
    }
}

fn show(l: &Lts) -> String {
    write_aut(l)
}

fn mutate<R: Rng>(rng: &mut R, l: &Lts) -> Lts {
    let mut es = edges(l);
    if es.is_empty() {
        return l.clone();
    }
    let i = rng.gen_range(0..es.len());
    if rng.gen_bool(0.5) {
        es.remove(i);
    } else {
        es[i].1 = if rng.gen_bool(0.3) { "tau".into() } else { VISIBLE[rng.gen_range(0..3)].into() };
    }
    from_edges(l.num_states(), l.initial(), &es)
}

/// Unrelated, bisimilar by construction, or a near miss.
pub fn random_pair<R: Rng>(rng: &mut R) -> (Lts, Lts) {
    let l = random_lts(rng, MAX_STATES);
    let r = match rng.gen_range(0..3) {
        0 => random_lts(rng, MAX_STATES),
        1 => perturb(rng, &l),
        _ => {
            let p = perturb(rng, &l);
            mutate(rng, &p)
        }
    };
    (l, r)
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Weak => "weak",
        Mode::Strong => "strong",
    }
}

/// Checks a verdict against the oracle. A distinguishing formula must hold
/// on the left and fail on the right.
fn agrees(l: &Lts, r: &Lts, mode: Mode, v: &Verdict) -> Result<bool, String> {
    let expected = oracle_bisimilar(l, r, mode == Mode::Weak);
    if v.is_equivalent() != expected {
        return Err(format!(
            "{} verdict {} but oracle says {}\nleft:\n{}right:\n{}",
            mode_name(mode),
            v.is_equivalent(),
            expected,
            show(l),
            show(r)
        ));
    }
    if let Some(f) = v.formula() {
        let on_left = oracle_holds(f, l, l.initial());
        let on_right = oracle_holds(f, r, r.initial());
        if !on_left || on_right {
            return Err(format!(
                "formula {f} gives {on_left} on the left and {on_right} on the right\nleft:\n{}right:\n{}",
                show(l),
                show(r)
            ));
        }
    }
    Ok(expected)
}

pub fn oracle_agreement(seed: u64, cases: usize, mode: Mode) -> Result<Tally, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::default();
    for _ in 0..cases {
        let (l, r) = random_pair(&mut rng);
        let v = check(&l, &r, mode);
        tally.count(agrees(&l, &r, mode, &v)?);
    }
    Ok(tally)
}

/// Reflexivity, symmetry, and transitivity along chains of perturbations.
pub fn equivalence_laws(seed: u64, cases: usize) -> Result<Tally, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::default();
    for _ in 0..cases {
        let l = random_lts(&mut rng, MAX_STATES);
        if !check(&l, &l, Mode::Weak).is_equivalent() || !check(&l, &l, Mode::Strong).is_equivalent() {
            return Err(format!("not reflexive on\n{}", show(&l)));
        }
        let (a, b) = random_pair(&mut rng);
        for mode in [Mode::Weak, Mode::Strong] {
            let ab = check(&a, &b, mode).is_equivalent();
            let ba = check(&b, &a, mode).is_equivalent();
            if ab != ba {
                return Err(format!("{} not symmetric\nleft:\n{}right:\n{}", mode_name(mode), show(&a), show(&b)));
            }
        }
        let p1 = perturb(&mut rng, &l);
        let p2 = perturb(&mut rng, &p1);
        for (x, y) in [(&l, &p1), (&p1, &p2), (&l, &p2)] {
            if !check(x, y, Mode::Weak).is_equivalent() {
                return Err(format!("perturbation broke equivalence\nleft:\n{}right:\n{}", show(x), show(y)));
            }
        }
        tally.count(check(&a, &b, Mode::Weak).is_equivalent());
    }
    Ok(tally)
}

/// `a.τ.P` and `a.P` are weakly but in general not strongly bisimilar.
pub fn tau_law(seed: u64, cases: usize) -> Result<Tally, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::default();
    for _ in 0..cases {
        let p = random_lts(&mut rng, MAX_STATES);
        let a = VISIBLE[rng.gen_range(0..3)];
        let with = prefixed(&p, a, true);
        let without = prefixed(&p, a, false);
        let v = check(&with, &without, Mode::Weak);
        if !v.is_equivalent() {
            return Err(format!("tau law fails for\n{}", show(&p)));
        }
        let strong = check(&with, &without, Mode::Strong);
        tally.count(agrees(&with, &without, Mode::Strong, &strong)?);
    }
    Ok(tally)
}

/// Weak bisimilarity coincides with strong bisimilarity of the saturations.
pub fn saturation(seed: u64, cases: usize) -> Result<Tally, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::default();
    for _ in 0..cases {
        let (l, r) = random_pair(&mut rng);
        let weak = check(&l, &r, Mode::Weak).is_equivalent();
        let (sl, sr) = (saturate(&l), saturate(&r));
        let strong = check(&sl, &sr, Mode::Strong);
        if strong.is_equivalent() != weak {
            return Err(format!("saturation mismatch\nleft:\n{}right:\n{}", show(&l), show(&r)));
        }
        agrees(&sl, &sr, Mode::Strong, &strong)?;
        tally.count(weak);
    }
    Ok(tally)
}

/// Parallel composition, hiding and relabeling preserve weak bisimilarity.
pub fn congruence(seed: u64, cases: usize) -> Result<Tally, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::default();
    for _ in 0..cases {
        let l = random_lts(&mut rng, MAX_STATES);
        let p = perturb(&mut rng, &l);
        let m = random_lts(&mut rng, 4);
        let sync = random_subset(&mut rng);
        let pl = parallel(&l, &m, &sync, 100_000).map_err(|e| e.to_string())?;
        let pp = parallel(&p, &m, &sync, 100_000).map_err(|e| e.to_string())?;
        let hidden = HideMode::Hide(random_subset(&mut rng));
        let (hl, hp) = (hide(&l, &hidden), hide(&p, &hidden));
        let map = random_renaming(&mut rng);
        let rl = relabel(&l, &map).map_err(|e| e.to_string())?;
        let rp = relabel(&p, &map).map_err(|e| e.to_string())?;
        for (what, x, y) in [("parallel", &pl, &pp), ("hiding", &hl, &hp), ("relabeling", &rl, &rp)] {
            let v = check(x, y, Mode::Weak);
            if !agrees(x, y, Mode::Weak, &v)? {
                return Err(format!("{what} is not a congruence\nleft:\n{}right:\n{}", show(x), show(y)));
            }
        }
        // Composing distinct systems with the same context may or may not
        // separate them; only agreement with the oracle is required.
        let r = random_lts(&mut rng, MAX_STATES);
        let pr = parallel(&r, &m, &sync, 100_000).map_err(|e| e.to_string())?;
        let v = check(&pl, &pr, Mode::Weak);
        tally.count(agrees(&pl, &pr, Mode::Weak, &v)?);
    }
    Ok(tally)
}

fn at(l: &Lts, s: u32) -> Lts {
    let mut out = l.clone();
    out.set_initial(s);
    out
}

/// The quotient is equivalent to the original, has pairwise distinct
/// states, and is a fixed point.
pub fn minimization(seed: u64, cases: usize) -> Result<Tally, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::default();
    for _ in 0..cases {
        let l = random_lts(&mut rng, MAX_STATES);
        for mode in [Mode::Weak, Mode::Strong] {
            let weak = mode == Mode::Weak;
            let m = minimize(&l, mode);
            if !oracle_bisimilar(&l, &m, weak) {
                return Err(format!("{} quotient differs from\n{}", mode_name(mode), show(&l)));
            }
            let n = m.num_states() as u32;
            for s in 0..n {
                for t in s + 1..n {
                    if oracle_bisimilar(&at(&m, s), &at(&m, t), weak) {
                        return Err(format!("{} quotient is not minimal for\n{}", mode_name(mode), show(&l)));
                    }
                }
            }
            if minimize(&m, mode).num_states() != m.num_states() {
                return Err(format!("{} minimization is not idempotent on\n{}", mode_name(mode), show(&l)));
            }
        }
        tally.count(minimize(&l, Mode::Weak).num_states() < l.reachable().len());
    }
    Ok(tally)
}

/// All of the above with one seed, as `(name, tally)` pairs.
pub fn all(seed: u64, cases: usize) -> Result<Vec<(&'static str, Tally)>, String> {
    Ok(vec![
        ("weak agreement", oracle_agreement(seed, cases, Mode::Weak)?),
        ("strong agreement", oracle_agreement(seed + 1, cases, Mode::Strong)?),
        ("equivalence laws", equivalence_laws(seed + 2, cases)?),
        ("tau law", tau_law(seed + 3, cases)?),
        ("saturation", saturation(seed + 4, cases)?),
        ("congruence", congruence(seed + 5, cases)?),
        ("minimization", minimization(seed + 6, cases)?),
    ])
}

const AUT_LABELS: [&str; 6] = ["tau", "a", "C.send_request#S.receive_request", "S.fail_exception", "x_1", "b"];

/// Writing, reading and writing again reproduces the text exactly, and the
/// parsed system has the same structure as the original.
pub fn aut_roundtrip(seed: u64, cases: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let n = rng.gen_range(1..=12);
        let mut l = Lts::with_states(n);
        l.set_initial(rng.gen_range(0..n as u32));
        for _ in 0..rng.gen_range(0..=3 * n) {
            let a = AUT_LABELS[rng.gen_range(0..AUT_LABELS.len())];
            l.add(rng.gen_range(0..n as u32), a, rng.gen_range(0..n as u32));
        }
        let text = write_aut(&l);
        let back = padl_core::kernel::parse_aut(&text).map_err(|e| format!("{e}\n{text}"))?;
        if write_aut(&back) != text {
            return Err(format!("text changed after a round trip\n{text}"));
        }
        if !back.same_structure(&l) {
            return Err(format!("structure changed after a round trip\n{text}"));
        }
    }
    Ok(cases)
}
