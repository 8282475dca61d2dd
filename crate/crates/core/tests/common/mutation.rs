use dtac_core::gen::{mutate, EditKind, Gen};
use dtac_core::guard::{check_guard, ViolationKind};
use dtac_core::printer::print_program;
use rand::seq::SliceRandom;

pub struct Tally {
    pub legal_accepted: usize,
    pub illegal_rejected: usize,
}

fn expected(k: EditKind) -> Option<ViolationKind> {
    match k {
        EditKind::Legal => None,
        EditKind::CodeChanged => Some(ViolationKind::CodeChanged),
        EditKind::PublicPreStrengthened => Some(ViolationKind::PublicPreStrengthened),
        EditKind::PublicPostWeakened => Some(ViolationKind::PublicPostWeakened),
        EditKind::SignatureChanged => Some(ViolationKind::SignatureChanged),
        EditKind::PublicRemoved => Some(ViolationKind::PublicRemoved),
    }
}

/// Generates edits until `want` legal and `want` illegal ones were checked.
pub fn mutation_suite(want: usize, seed: u64) -> Result<Tally, String> {
    let mut g = Gen::new(seed);
    let illegal = [
        EditKind::CodeChanged,
        EditKind::PublicPreStrengthened,
        EditKind::PublicPostWeakened,
        EditKind::SignatureChanged,
        EditKind::PublicRemoved,
    ];
    let mut t = Tally { legal_accepted: 0, illegal_rejected: 0 };
    let mut tries = 0;
    while t.legal_accepted < want || t.illegal_rejected < want {
        tries += 1;
        if tries > want * 50 {
            return Err(format!("generator starved after {tries} tries"));
        }
        let p = g.program();
        let kind = if t.legal_accepted < want && (t.illegal_rejected >= want || tries % 2 == 0) {
            EditKind::Legal
        } else {
            *illegal.choose(g.rng()).unwrap()
        };
        let Some(q) = mutate(&mut g, &p, kind) else { continue };
        let r = check_guard(&p, &q);
        match expected(kind) {
            None if r.ok() => t.legal_accepted += 1,
            None => return Err(format!("legal edit rejected: {r}\n{}\n---\n{}", print_program(&p), print_program(&q))),
            Some(v) if r.kinds().contains(&v) => t.illegal_rejected += 1,
            Some(v) => {
                return Err(format!("{kind:?} edit gave {r} (wanted {v:?})\n{}\n---\n{}", print_program(&p), print_program(&q)))
            }
        }
    }
    Ok(t)
}
